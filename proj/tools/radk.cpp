// radk: resource adequacy and ELCC studies from the command line.
//
//   radk gen-scenarios --config study.json
//   radk assess        --config study.json --dispatcher optimal
//   radk elcc          --config study.json
//   radk compare       --config study.json
//
// Exit codes: 0 success, 1 validation/config failure, 2 numerical or
// bracketing failure, 3 I/O failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "radk/config.hpp"
#include "radk/dispatch.hpp"
#include "radk/elcc.hpp"
#include "radk/heuristic.hpp"
#include "radk/io.hpp"
#include "radk/lp.hpp"
#include "radk/model.hpp"
#include "radk/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct CliOptions {
  std::string config_path;
  std::string dispatcher = "optimal";
  std::string scenarios_override;
  std::string dump_lp;
  unsigned threads = radk::default_threads();
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  bool emit_plot_data = false;
};

struct LoadedStudy {
  radk::StudyConfig cfg;
  radk::TraceStore traces;
  radk::LoadModel load;  // shape-normalized
};

LoadedStudy load_study(const CliOptions& opt, bool need_traces) {
  LoadedStudy s;
  s.cfg = radk::load_config(opt.config_path);
  if (opt.has_seed_override) s.cfg.seed = opt.seed_override;
  if (!opt.scenarios_override.empty())
    s.cfg.scenario_cache = opt.scenarios_override;
  if (s.cfg.traces_path.empty()) {
    if (need_traces)
      throw radk::ConfigError("config: paths.traces is required");
    return s;
  }
  s.traces = radk::load_trace_csv(s.cfg.traces_path);
  radk::normalize_to_peak(s.traces, s.cfg.load.load_trace_id);
  s.load = {s.cfg.load.peak_mw, s.cfg.load.load_trace_id + "_shape"};

  auto violations = radk::validate(s.cfg.system, s.load, s.traces);
  if (!violations.empty()) {
    for (const auto& v : violations) {
      std::cerr << "validation: " << (v.unit_id.empty() ? "system" : v.unit_id)
                << "." << v.field << ": " << v.message;
      if (v.step >= 0) std::cerr << " (step " << v.step << ")";
      std::cerr << "\n";
    }
    throw radk::ConfigError("system validation failed");
  }
  return s;
}

radk::ScenarioSet load_cache_checked(const LoadedStudy& s) {
  auto set = radk::read_scenario_cache(s.cfg.scenario_cache);
  auto expect = radk::hash_generation_inputs(s.cfg.system, s.load, s.traces,
                                             s.cfg.scenario_count, s.cfg.seed,
                                             s.cfg.gen);
  if (set.input_hash != expect)
    throw radk::ConfigError(
        "scenario cache was generated from a different config; re-run "
        "gen-scenarios");
  return set;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw radk::IoError("cannot write: " + path.string());
  os << text;
  if (!os) throw radk::IoError("write failed: " + path.string());
}

// Comment block placed at the top of every CSV output so each file carries
// its own provenance.
std::string csv_provenance(const radk::StudyConfig& cfg,
                           const std::string& fingerprint) {
  std::ostringstream os;
  os << "# " << radk::kToolVersion << "\n";
  os << "# config_hash: " << cfg.config_hash << "\n";
  os << "# scenario_fingerprint: " << fingerprint << "\n";
  os << "# feas_tol: " << cfg.feas_tol << " opt_tol: " << cfg.opt_tol << "\n";
  return os.str();
}

// Study metadata worth surfacing next to results: the heuristic priority
// rules are a stand-in for operator practice, and tank recharge changes the
// portfolio's character, so both are labeled explicitly.
json study_metadata(const radk::StudyConfig& cfg) {
  json meta;
  meta["priority"] = {
      {"charge_order", cfg.priority.charge_order == radk::ChargeOrder::EtaDescending
                           ? "eta_desc"
                           : "list"},
      {"discharge_order",
       cfg.priority.discharge_order == radk::DischargeOrder::DurationDescending
           ? "duration_desc"
           : "list"}};
  json recharge = json::object();
  auto note = [&recharge](const radk::HydrogenPortfolio& p) {
    recharge[p.id] = p.sales_floor() < p.ely_nominal_mw;
  };
  for (const auto& p : cfg.system.colocated) note(p);
  for (const auto& p : cfg.addition.colocated) note(p);
  meta["tank_recharge_enabled"] = recharge;
  return meta;
}

radk::ElccStudy make_study(const LoadedStudy& s, const radk::ScenarioSet& set,
                           radk::Dispatcher dispatcher, unsigned threads) {
  radk::ElccStudy study;
  study.resources = s.cfg.system;
  study.load = s.load;
  study.scenarios = &set;
  study.traces = &s.traces;
  study.dispatcher = dispatcher;
  study.metric = s.cfg.metric;
  study.epsilon = s.cfg.epsilon;
  study.delta_lo = s.cfg.delta_lo;
  study.delta_hi = s.cfg.delta_hi;
  study.delta_resolution = s.cfg.delta_resolution;
  study.mode = s.cfg.benchmark;
  study.reference_efor = s.cfg.reference_efor;
  study.reference_mean_repair_hours = s.cfg.reference_mean_repair_hours;
  study.target_metric = s.cfg.target_metric;
  study.addition = s.cfg.addition;
  study.priority = s.cfg.priority;
  study.dispatch.feas_tol = s.cfg.feas_tol;
  study.dispatch.opt_tol = s.cfg.opt_tol;
  study.dispatch.lole_eps = s.cfg.lole_eps;
  study.threads = threads;
  return study;
}

double installed_capacity_mw(const radk::ResourceAddition& add) {
  double mw = 0.0;
  for (const auto& u : add.unlimited) mw += u.capacity_mw;
  for (const auto& v : add.variable) mw += v.capacity_mw;
  for (const auto& s : add.storage) mw += s.p_discharge_max_mw;
  for (const auto& c : add.colocated) mw += c.wind_capacity_mw + c.fc_max_mw;
  return mw;
}

int cmd_gen_scenarios(const CliOptions& opt) {
  auto s = load_study(opt, true);
  auto set = radk::generate(s.cfg.system, s.load, s.traces,
                            s.cfg.scenario_count, s.cfg.seed, s.cfg.gen,
                            opt.threads);
  fs::create_directories(fs::path(s.cfg.scenario_cache).parent_path().empty()
                             ? "."
                             : fs::path(s.cfg.scenario_cache).parent_path());
  radk::write_scenario_cache(set, s.cfg.scenario_cache);
  std::cout << "scenarios: " << set.count << "\n";
  std::cout << "fingerprint: " << set.fingerprint << "\n";
  std::cout << "cache: " << s.cfg.scenario_cache << "\n";
  return kExitOk;
}

int cmd_assess(const CliOptions& opt) {
  auto s = load_study(opt, true);
  auto set = load_cache_checked(s);
  fs::create_directories(s.cfg.output_dir);

  radk::Dispatcher dispatcher = opt.dispatcher == "heuristic"
                                    ? radk::Dispatcher::Heuristic
                                    : radk::Dispatcher::Optimal;
  radk::DispatchOptions dopt;
  dopt.feas_tol = s.cfg.feas_tol;
  dopt.opt_tol = s.cfg.opt_tol;
  dopt.lole_eps = s.cfg.lole_eps;

  const std::size_t N = set.scenarios.size();
  std::vector<radk::DispatchResult> results(N);
  radk::parallel_for(N, opt.threads, [&](std::size_t n) {
    const auto& sc = set.scenarios[n];
    if (dispatcher == radk::Dispatcher::Optimal)
      results[n] = radk::dispatch_optimal(s.cfg.system, sc, sc.load_mw, dopt);
    else
      results[n] = radk::dispatch_heuristic(s.cfg.system, sc, sc.load_mw,
                                            s.cfg.priority, dopt.lole_eps);
  });

  if (!opt.dump_lp.empty()) {
    auto built = radk::build_lp(s.cfg.system, set.scenarios[0],
                                set.scenarios[0].load_mw);
    std::ofstream os(opt.dump_lp);
    if (!os) throw radk::IoError("cannot write: " + opt.dump_lp);
    radk::write_mps(built.lp, os, "DISPATCH0");
  }

  double eue = 0.0, lole = 0.0;
  std::ostringstream per;
  per << csv_provenance(s.cfg, set.fingerprint);
  per << "scenario_id,eue_mwh,lole_steps,peak_shortfall_mw\n";
  for (std::size_t n = 0; n < N; ++n) {
    eue += results[n].eue_mwh;
    lole += static_cast<double>(results[n].lole_steps);
    per << set.scenarios[n].scenario_id << ',' << results[n].eue_mwh << ','
        << results[n].lole_steps << ',' << results[n].peak_shortfall_mw
        << '\n';
  }
  eue /= static_cast<double>(N);
  lole /= static_cast<double>(N);

  json report;
  report["provenance"] = radk::provenance(s.cfg.config_hash, set.fingerprint,
                                          s.cfg.feas_tol, s.cfg.opt_tol);
  report["dispatcher"] = opt.dispatcher;
  report["metadata"] = study_metadata(s.cfg);
  report["scenario_count"] = N;
  report["r_hat_eue_mwh"] = eue;
  report["r_hat_lole_steps"] = lole;
  report["config"] = s.cfg.raw;

  fs::path out(s.cfg.output_dir);
  write_text(out / "assess_report.json", report.dump(2) + "\n");
  write_text(out / "assess_per_scenario.csv", per.str());
  {
    std::ostringstream os;
    os << csv_provenance(s.cfg, set.fingerprint);
    radk::write_dispatch_csv(s.cfg.system, set.scenarios[0],
                             set.scenarios[0].load_mw, results[0], os);
    write_text(out / "assess_dispatch_scenario0.csv", os.str());
  }
  std::cout << "r_hat_eue_mwh: " << eue << "\n";
  std::cout << "r_hat_lole_steps: " << lole << "\n";
  return kExitOk;
}

int cmd_elcc(const CliOptions& opt) {
  auto s = load_study(opt, true);
  auto set = load_cache_checked(s);
  fs::create_directories(s.cfg.output_dir);
  if (s.cfg.addition.empty())
    throw radk::ConfigError("elcc: study.addition is required");

  radk::Dispatcher dispatcher = opt.dispatcher == "heuristic"
                                    ? radk::Dispatcher::Heuristic
                                    : radk::Dispatcher::Optimal;
  auto study = make_study(s, set, dispatcher, opt.threads);
  auto result = radk::elcc_benchmark(study);

  json report;
  report["provenance"] = radk::provenance(s.cfg.config_hash, set.fingerprint,
                                          s.cfg.feas_tol, s.cfg.opt_tol);
  report["dispatcher"] = opt.dispatcher;
  report["metadata"] = study_metadata(s.cfg);
  report["result"] = radk::elcc_result_json(result);
  report["config"] = s.cfg.raw;

  fs::path out(s.cfg.output_dir);
  write_text(out / "elcc_result.json", report.dump(2) + "\n");
  {
    std::ostringstream os;
    os << csv_provenance(s.cfg, set.fingerprint);
    os << "elcc_mw,baseline_metric,matched_metric,residual,iterations\n";
    os << result.delta_mw << ',' << result.baseline_metric << ','
       << result.matched_metric << ',' << result.residual << ','
       << result.iterations << '\n';
    write_text(out / "elcc_summary.csv", os.str());
  }
  if (opt.emit_plot_data) {
    std::ostringstream os;
    os << csv_provenance(s.cfg, set.fingerprint);
    os << "delta_mw,metric\n";
    for (const auto& [d, v] : result.trace) os << d << ',' << v << '\n';
    write_text(out / "elcc_trace.csv", os.str());
  }
  std::cout << "elcc_mw: " << result.delta_mw << "\n";
  return kExitOk;
}

int cmd_compare(const CliOptions& opt) {
  auto s = load_study(opt, true);
  auto set = load_cache_checked(s);
  fs::create_directories(s.cfg.output_dir);
  if (s.cfg.addition.empty())
    throw radk::ConfigError("compare: study.addition is required");
  if (s.cfg.scaling_factors.empty())
    throw radk::ConfigError("compare: study.scaling_factors is required");

  std::ostringstream csv, plot;
  csv << csv_provenance(s.cfg, set.fingerprint);
  csv << "factor,heuristic_elcc_mw,optimal_elcc_mw\n";
  plot << csv_provenance(s.cfg, set.fingerprint);
  plot << "factor,installed_capacity_mw,method,elcc_mw\n";
  json rows = json::array();
  for (double factor : s.cfg.scaling_factors) {
    auto scaled = radk::scale_addition(s.cfg.addition, factor);

    auto opt_study = make_study(s, set, radk::Dispatcher::Optimal, opt.threads);
    opt_study.addition = scaled;
    auto optimal = radk::elcc_benchmark(opt_study);

    auto heu_study = make_study(s, set, radk::Dispatcher::Heuristic, opt.threads);
    heu_study.addition = scaled;
    auto heuristic = radk::elcc_benchmark(heu_study);

    if (optimal.delta_mw < heuristic.delta_mw - 1e-9)
      throw radk::ElccError(
          "dominance violated: optimal ELCC " +
          std::to_string(optimal.delta_mw) + " < heuristic " +
          std::to_string(heuristic.delta_mw) + " at factor " +
          std::to_string(factor));

    csv << factor << ',' << heuristic.delta_mw << ',' << optimal.delta_mw
        << '\n';
    double installed = installed_capacity_mw(scaled);
    plot << factor << ',' << installed << ",heuristic," << heuristic.delta_mw
         << '\n';
    plot << factor << ',' << installed << ",optimal," << optimal.delta_mw
         << '\n';
    rows.push_back({{"factor", factor},
                    {"installed_capacity_mw", installed},
                    {"heuristic_elcc_mw", heuristic.delta_mw},
                    {"optimal_elcc_mw", optimal.delta_mw}});
    std::cout << "factor " << factor << ": heuristic " << heuristic.delta_mw
              << " MW, optimal " << optimal.delta_mw << " MW\n";
  }

  json report;
  report["provenance"] = radk::provenance(s.cfg.config_hash, set.fingerprint,
                                          s.cfg.feas_tol, s.cfg.opt_tol);
  report["metadata"] = study_metadata(s.cfg);
  report["rows"] = rows;
  report["config"] = s.cfg.raw;
  fs::path out(s.cfg.output_dir);
  write_text(out / "compare.json", report.dump(2) + "\n");
  write_text(out / "compare.csv", csv.str());
  if (opt.emit_plot_data) write_text(out / "compare_plot.csv", plot.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radk: resource adequacy and ELCC toolkit"};
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* cmd, bool with_dispatcher) {
    cmd->add_option("--config", opt.config_path, "study configuration JSON")
        ->required();
    cmd->add_option("--threads", opt.threads, "worker threads");
    cmd->add_option("--scenarios", opt.scenarios_override,
                    "scenario cache path override");
    cmd->add_option("--seed", opt.seed_override, "seed override")
        ->each([&](const std::string&) { opt.has_seed_override = true; });
    cmd->add_flag("--emit-plot-data", opt.emit_plot_data,
                  "write tidy long-format plot CSVs");
    if (with_dispatcher)
      cmd->add_option("--dispatcher", opt.dispatcher,
                      "optimal or heuristic")
          ->check(CLI::IsMember({"optimal", "heuristic"}));
  };

  auto* gen = app.add_subcommand("gen-scenarios", "sample and cache scenarios");
  add_common(gen, false);
  auto* assess = app.add_subcommand("assess", "reliability assessment");
  add_common(assess, true);
  assess->add_option("--dump-lp", opt.dump_lp,
                     "write scenario 0's dispatch LP in MPS format");
  auto* elcc = app.add_subcommand("elcc", "accredit one resource addition");
  add_common(elcc, true);
  auto* compare = app.add_subcommand("compare",
                                     "heuristic vs optimal accreditation sweep");
  add_common(compare, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_scenarios(opt);
    if (assess->parsed()) return cmd_assess(opt);
    if (elcc->parsed()) return cmd_elcc(opt);
    if (compare->parsed()) return cmd_compare(opt);
  } catch (const radk::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const radk::ElccError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const radk::DispatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const radk::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
