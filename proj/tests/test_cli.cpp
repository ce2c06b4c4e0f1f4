#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef RADK_CLI_PATH
#define RADK_CLI_PATH "radk"
#endif

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() /
          ("radk-cli-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

int run(const std::string& args, const fs::path& cwd) {
  std::string cmd = "cd " + cwd.string() + " && " + RADK_CLI_PATH + " " + args +
                    " >stdout.txt 2>stderr.txt";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_traces(const fs::path& p, int days = 14) {
  std::ofstream os(p);
  os << "timestamp,load_mw,wind_cf,solar_cf\n";
  for (int h = 0; h < days * 24; ++h) {
    double tod = (h % 24) / 24.0;
    double load = 40.0 + 20.0 * std::sin(6.2832 * (tod - 0.3)) +
                  3.0 * std::sin(0.77 * h);
    double wind = 0.4 + 0.3 * std::sin(0.3 * h + 1.0);
    double solar = tod > 0.25 && tod < 0.75 ? std::sin(6.2832 * (tod - 0.25)) : 0.0;
    os << h << ',' << load << ',' << std::max(0.0, std::min(1.0, wind)) << ','
       << std::max(0.0, std::min(1.0, solar)) << '\n';
  }
}

std::string base_config() {
  return R"({
  "system": {
    "horizon": {"steps": 48, "step_hours": 1.0},
    "unlimited": [
      {"id": "g1", "capacity_mw": 30, "efor": 0.08, "mean_repair_hours": 24},
      {"id": "g2", "capacity_mw": 25, "efor": 0.08, "mean_repair_hours": 24}
    ],
    "variable": [{"id": "wind", "capacity_mw": 15, "trace": "wind_cf"}],
    "storage": [{"id": "batt", "p_charge_max_mw": 5, "p_discharge_max_mw": 5,
                 "e_max_mwh": 20, "eta_charge": 0.9, "initial_soc_mwh": 10}]
  },
  "load": {"peak_mw": 60, "trace": "load_mw"},
  "scenario": {"count": 25, "seed": 11},
  "solver": {"feas_tol": 1e-6, "opt_tol": 1e-6},
  "study": {
    "epsilon": 1e-6, "delta_lo": -3.0, "delta_hi": 6.0,
    "delta_resolution": 0.01,
    "addition": {"colocated": [
      {"id": "h2", "wind_capacity_mw": 2, "wind_trace": "wind_cf",
       "ely_nominal_mw": 1.6, "ely_dr_fraction": 0.5,
       "fc_max_mw": 1.0, "tank_max_mwh_h2": 2.0,
       "tank_initial_mwh_h2": 2.0}]},
    "scaling_factors": [1.0, 1.5]
  },
  "paths": {"traces": "traces.csv", "output_dir": "out",
            "scenario_cache": "scenarios.bin"}
})";
}

}  // namespace

TEST_CASE("gen-scenarios is deterministic and assess reproduces bytes") {
  Sandbox sb;
  write_traces(sb.dir / "traces.csv");
  std::ofstream(sb.dir / "study.json") << base_config();

  REQUIRE(run("gen-scenarios --config study.json", sb.dir) == 0);
  auto first = slurp(sb.dir / "stdout.txt");
  REQUIRE(first.find("fingerprint: ") != std::string::npos);

  REQUIRE(run("gen-scenarios --config study.json", sb.dir) == 0);
  CHECK(slurp(sb.dir / "stdout.txt") == first);

  REQUIRE(run("assess --config study.json", sb.dir) == 0);
  auto report = slurp(sb.dir / "out/assess_report.json");
  auto per = slurp(sb.dir / "out/assess_per_scenario.csv");
  REQUIRE(report.find("r_hat_eue_mwh") != std::string::npos);

  REQUIRE(run("assess --config study.json", sb.dir) == 0);
  CHECK(slurp(sb.dir / "out/assess_report.json") == report);
  CHECK(slurp(sb.dir / "out/assess_per_scenario.csv") == per);
}

TEST_CASE("optimal assessment never exceeds the heuristic") {
  Sandbox sb;
  write_traces(sb.dir / "traces.csv");
  std::ofstream(sb.dir / "study.json") << base_config();
  REQUIRE(run("gen-scenarios --config study.json", sb.dir) == 0);

  REQUIRE(run("assess --config study.json --dispatcher optimal", sb.dir) == 0);
  auto opt = slurp(sb.dir / "stdout.txt");
  REQUIRE(run("assess --config study.json --dispatcher heuristic", sb.dir) == 0);
  auto heu = slurp(sb.dir / "stdout.txt");
  auto value = [](const std::string& text) {
    auto at = text.find("r_hat_eue_mwh: ");
    return std::stod(text.substr(at + 15));
  };
  CHECK(value(opt) <= value(heu) + 1e-9);
}

TEST_CASE("elcc on a perfect generator and MPS dump") {
  Sandbox sb;
  write_traces(sb.dir / "traces.csv");
  std::ofstream(sb.dir / "study.json") << base_config();
  REQUIRE(run("gen-scenarios --config study.json", sb.dir) == 0);
  REQUIRE(run("assess --config study.json --dump-lp out/d0.mps", sb.dir) == 0);
  CHECK(slurp(sb.dir / "out/d0.mps").find("ENDATA") != std::string::npos);

  REQUIRE(run("elcc --config study.json --emit-plot-data", sb.dir) == 0);
  auto out = slurp(sb.dir / "stdout.txt");
  REQUIRE(out.find("elcc_mw: ") != std::string::npos);
  double elcc = std::stod(out.substr(out.find("elcc_mw: ") + 9));
  CHECK(elcc >= -3.0);  // portfolio export limit bounds the answer
  CHECK(elcc <= 3.0);
  CHECK(slurp(sb.dir / "out/elcc_result.json").find("scenario_fingerprint") !=
        std::string::npos);
  auto trace_csv = slurp(sb.dir / "out/elcc_trace.csv");
  CHECK(trace_csv.find("# radk") == 0);
  CHECK(trace_csv.find("delta_mw,metric") != std::string::npos);
}

TEST_CASE("compare sweeps factors with dominance in every row") {
  Sandbox sb;
  write_traces(sb.dir / "traces.csv");
  std::ofstream(sb.dir / "study.json") << base_config();
  REQUIRE(run("gen-scenarios --config study.json", sb.dir) == 0);
  REQUIRE(run("compare --config study.json", sb.dir) == 0);
  auto csv = slurp(sb.dir / "out/compare.csv");
  REQUIRE(csv.find("# radk") == 0);  // provenance comment block
  REQUIRE(csv.find("scenario_fingerprint") != std::string::npos);
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line) && !line.empty() && line[0] == '#') {
  }
  REQUIRE(line == "factor,heuristic_elcc_mw,optimal_elcc_mw");
  int rows = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++rows;
    std::stringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    std::getline(ls, cell, ',');
    double heu = std::stod(cell);
    std::getline(ls, cell, ',');
    double opt = std::stod(cell);
    CHECK(opt >= heu - 1e-9);
  }
  CHECK(rows == 2);
}

TEST_CASE("benchmark modes run through the config") {
  Sandbox sb;
  write_traces(sb.dir / "traces.csv");
  auto cfg = base_config();
  const std::string bench_key = "\"epsilon\": 1e-6,";
  cfg.replace(cfg.find(bench_key), bench_key.size(),
              "\"epsilon\": 1e-6, \"benchmark\": \"perfect-generator\",");
  const std::string lo_key = "\"delta_lo\": -3.0";
  cfg.replace(cfg.find(lo_key), lo_key.size(), "\"delta_lo\": 0.0");
  std::ofstream(sb.dir / "study.json") << cfg;
  REQUIRE(run("gen-scenarios --config study.json", sb.dir) == 0);
  REQUIRE(run("elcc --config study.json", sb.dir) == 0);
  auto out = slurp(sb.dir / "stdout.txt");
  double q = std::stod(out.substr(out.find("elcc_mw: ") + 9));
  // Equivalent perfectly reliable capacity of the portfolio.
  CHECK(q >= 0.0);
  CHECK(q <= 3.0);
  CHECK(slurp(sb.dir / "out/elcc_result.json").find("tank_recharge_enabled") !=
        std::string::npos);
}

TEST_CASE("exit codes: validation, cache mismatch, missing file") {
  Sandbox sb;
  write_traces(sb.dir / "traces.csv");

  // Unknown key is a validation failure.
  auto bad = base_config();
  bad.insert(bad.find("\"scenario\""), "\"scneario\": {},");
  std::ofstream(sb.dir / "bad.json") << bad;
  CHECK(run("gen-scenarios --config bad.json", sb.dir) == 1);

  // N = 0 is a validation failure.
  auto zero = base_config();
  auto at = zero.find("\"count\": 25");
  zero.replace(at, 11, "\"count\": 0");
  std::ofstream(sb.dir / "zero.json") << zero;
  CHECK(run("gen-scenarios --config zero.json", sb.dir) == 1);

  // Assess without a cache is an I/O failure.
  std::ofstream(sb.dir / "study.json") << base_config();
  CHECK(run("assess --config study.json", sb.dir) == 3);

  // A cache from a different seed is a config mismatch.
  REQUIRE(run("gen-scenarios --config study.json", sb.dir) == 0);
  CHECK(run("assess --config study.json --seed 999", sb.dir) == 1);

  // Bracketing failure surfaces as a numerical error: the search interval
  // cannot contain the portfolio's worth.
  auto narrow = base_config();
  const std::string hi_key = "\"delta_hi\": 6.0";
  narrow.replace(narrow.find(hi_key), hi_key.size(), "\"delta_hi\": 0.01");
  const std::string lo_key = "\"delta_lo\": -3.0";
  narrow.replace(narrow.find(lo_key), lo_key.size(), "\"delta_lo\": 0.005");
  std::ofstream(sb.dir / "narrow.json") << narrow;
  CHECK(run("elcc --config narrow.json", sb.dir) == 2);
}

TEST_CASE("validation failures name the offending unit") {
  Sandbox sb;
  write_traces(sb.dir / "traces.csv");
  auto cfg = base_config();
  auto at = cfg.find("\"eta_charge\": 0.9");
  cfg.replace(at, 17, "\"eta_charge\": 1.2");
  std::ofstream(sb.dir / "study.json") << cfg;
  CHECK(run("gen-scenarios --config study.json", sb.dir) == 1);
  auto err = slurp(sb.dir / "stderr.txt");
  CHECK(err.find("batt.eta_charge") != std::string::npos);
}
