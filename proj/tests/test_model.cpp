#include <catch2/catch_amalgamated.hpp>

#include "radk/dispatch.hpp"
#include "radk/model.hpp"
#include "radk/scenario.hpp"

using namespace radk;

namespace {

TraceStore basic_traces(std::size_t T) {
  TraceStore ts;
  std::vector<double> flat_cf(T, 0.5);
  std::vector<double> shape(T, 0.8);
  shape[0] = 1.0;
  ts.put("wind_cf", flat_cf);
  ts.put("shape", shape);
  ts.put("flex_base", std::vector<double>(T, 4.0));
  ts.put("flex_cap", std::vector<double>(T, 2.0));
  return ts;
}

SystemResources small_system(std::size_t T = 6) {
  SystemResources res;
  res.horizon = {T, 1.0};
  res.unlimited.push_back({"gen1", 10.0, 0.05, 24.0});
  res.variable.push_back({"wind1", 5.0, "wind_cf"});
  res.storage.push_back({"batt1", 1.0, 1.0, 0.0, 4.0, 0.9, 2.0});
  res.flexible.push_back({"flex1", "flex_base", "flex_cap"});
  return res;
}

}  // namespace

TEST_CASE("well-formed system validates cleanly") {
  auto traces = basic_traces(6);
  auto res = small_system();
  LoadModel load{10.0, "shape"};
  CHECK(validate(res, load, traces).empty());
}

TEST_CASE("bad storage efficiency is flagged with unit and field") {
  auto traces = basic_traces(6);
  auto res = small_system();
  res.storage[0].eta_charge = 1.2;
  LoadModel load{10.0, "shape"};
  auto v = validate(res, load, traces);
  REQUIRE(v.size() == 1);
  CHECK(v[0].unit_id == "batt1");
  CHECK(v[0].field == "eta_charge");
}

TEST_CASE("flex cap above baseline is flagged with the step index") {
  auto traces = basic_traces(6);
  std::vector<double> cap(6, 2.0);
  cap[3] = 5.0;  // above the 4.0 baseline
  traces.put("flex_cap", cap);
  auto res = small_system();
  LoadModel load{10.0, "shape"};
  auto v = validate(res, load, traces);
  REQUIRE(v.size() == 1);
  CHECK(v[0].unit_id == "flex1");
  CHECK(v[0].step == 3);
}

TEST_CASE("load shape must peak at one") {
  auto traces = basic_traces(6);
  traces.put("bad_shape", std::vector<double>(6, 0.7));
  auto res = small_system();
  LoadModel load{10.0, "bad_shape"};
  auto v = validate(res, load, traces);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].field == "load.trace_id");
}

TEST_CASE("augment adds units and leaves the input untouched") {
  auto res = small_system();
  ResourceAddition add;
  add.unlimited.push_back({"perfect", 1.0, 0.0, 1.0});
  auto grown = augment(res, add);
  CHECK(grown.unlimited.size() == 2);
  CHECK(res.unlimited.size() == 1);
  CHECK(grown.storage.size() == res.storage.size());
}

TEST_CASE("augmenting a hydrogen portfolio raises the COL count") {
  auto res = small_system();
  ResourceAddition add;
  HydrogenPortfolio h2;
  h2.id = "h2-plant";
  h2.wind_capacity_mw = 10.0;
  h2.wind_trace_id = "wind_cf";
  h2.ely_nominal_mw = 8.0;
  h2.ely_dr_fraction = 0.5;
  h2.fc_max_mw = 5.0;
  h2.tank_max_mwh_h2 = 10.0;
  h2.tank_initial_mwh_h2 = 10.0;
  add.colocated.push_back(h2);
  auto grown = augment(res, add);
  CHECK(grown.colocated.size() == 1);
}

TEST_CASE("augment rejects duplicate ids") {
  auto res = small_system();
  ResourceAddition add;
  add.unlimited.push_back({"gen1", 1.0, 0.0, 1.0});
  CHECK_THROWS_AS(augment(res, add), std::invalid_argument);
}

TEST_CASE("scale_load adjusts the peak and keeps the shape") {
  LoadModel load{650.0, "shape"};
  auto same = scale_load(load, 0.0);
  CHECK(same.peak_mw == 650.0);
  CHECK(same.load_trace_id == "shape");
  auto up = scale_load(load, 65.0);
  CHECK(up.peak_mw == Catch::Approx(715.0));
  CHECK_THROWS_AS(scale_load(LoadModel{100.0, "shape"}, -100.0),
                  std::invalid_argument);
}

TEST_CASE("scale_load composes additively on realized values") {
  LoadModel load{100.0, "shape"};
  auto a = scale_load(scale_load(load, 7.5), 2.5);
  auto b = scale_load(load, 10.0);
  // Realized step load is shape * peak, so equal peaks mean equal series.
  CHECK(a.peak_mw == Catch::Approx(b.peak_mw).margin(1e-9));
}

TEST_CASE("identical batteries merge additively") {
  TraceStore traces = basic_traces(6);
  SystemResources res;
  res.horizon = {6, 1.0};
  res.storage.push_back({"a", 1.0, 1.0, 0.0, 4.0, 0.9, 1.0});
  res.storage.push_back({"b", 1.0, 1.0, 0.0, 4.0, 0.9, 1.0});
  auto agg = aggregate_classes(res, traces);
  REQUIRE(agg.storage.size() == 1);
  CHECK(agg.storage[0].p_charge_max_mw == Catch::Approx(2.0));
  CHECK(agg.storage[0].e_max_mwh == Catch::Approx(8.0));
  CHECK(agg.storage[0].initial_soc_mwh == Catch::Approx(2.0));
}

TEST_CASE("different efficiencies stay separate") {
  TraceStore traces = basic_traces(6);
  SystemResources res;
  res.horizon = {6, 1.0};
  res.storage.push_back({"a", 1.0, 1.0, 0.0, 4.0, 0.9, 1.0});
  res.storage.push_back({"b", 1.0, 1.0, 0.0, 4.0, 0.8, 1.0});
  auto agg = aggregate_classes(res, traces);
  CHECK(agg.storage.size() == 2);
  CHECK(agg.storage[0].id == "a");  // untouched when nothing merges
}

TEST_CASE("augmentation order does not change dispatch outcomes") {
  TraceStore traces;
  std::size_t len = 48;
  std::vector<double> cf(len);
  Rng noise(4);
  for (auto& v : cf) v = noise.uniform();
  traces.put("wind_cf", cf);
  std::vector<double> shape(len, 0.8);
  shape[7] = 1.0;
  traces.put("shape", shape);

  SystemResources base;
  base.horizon = {24, 1.0};
  base.unlimited.push_back({"gen", 6.0, 0.1, 12.0});
  LoadModel load{10.0, "shape"};

  ResourceAddition a, b;
  a.variable.push_back({"wind-a", 3.0, "wind_cf"});
  b.storage.push_back({"batt-b", 1.0, 1.0, 0.0, 4.0, 0.9, 2.0});

  auto ab = augment(augment(base, a), b);
  auto ba = augment(augment(base, b), a);
  auto set_ab = generate(ab, load, traces, 5, 21);
  auto set_ba = generate(ba, load, traces, 5, 21);
  for (std::size_t n = 0; n < 5; ++n) {
    auto r1 = dispatch_optimal(ab, set_ab.scenarios[n],
                               set_ab.scenarios[n].load_mw);
    auto r2 = dispatch_optimal(ba, set_ba.scenarios[n],
                               set_ba.scenarios[n].load_mw);
    CHECK(r1.eue_mwh == Catch::Approx(r2.eue_mwh).margin(1e-9));
    CHECK(r1.lole_steps == r2.lole_steps);
  }
}

TEST_CASE("class aggregation never changes the optimal EUE") {
  Rng rng(888);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t T = 4 + rng.below(21);  // up to 24 steps
    std::size_t len = std::max<std::size_t>(T, 24);
    TraceStore traces;
    std::vector<double> shape(len);
    for (auto& v : shape) v = 0.5 + 0.5 * rng.uniform();
    shape[rng.below(len)] = 1.0;
    traces.put("shape", shape);

    SystemResources res;
    res.horizon = {T, 1.0};
    res.unlimited.push_back({"gen", 3.0 + rng.uniform(0.0, 3.0), 0.2, 8.0});
    // Two pairs of identical batteries plus an odd one.
    for (int i = 0; i < 2; ++i)
      res.storage.push_back({"a" + std::to_string(i), 1.0, 1.0, 0.0, 4.0, 0.9,
                             2.0});
    for (int i = 0; i < 2; ++i)
      res.storage.push_back({"b" + std::to_string(i), 0.5, 0.5, 0.0, 1.0, 0.8,
                             0.5});
    res.storage.push_back({"odd", 2.0, 1.5, 0.0, 3.0, 1.0, 1.0});
    // Three flexible units with distinct flat traces.
    for (int i = 0; i < 3; ++i) {
      std::string base_id = "fb" + std::to_string(i);
      std::string cap_id = "fc" + std::to_string(i);
      double baseline = 0.5 + 0.5 * i;
      traces.put(base_id, std::vector<double>(len, baseline));
      traces.put(cap_id, std::vector<double>(len, 0.4 * baseline));
      res.flexible.push_back({"flex" + std::to_string(i), base_id, cap_id});
    }
    LoadModel load{5.0 + rng.uniform(0.0, 3.0), "shape"};
    REQUIRE(validate(res, load, traces).empty());

    auto agg = aggregate_classes(res, traces);
    REQUIRE(agg.storage.size() == 3);
    REQUIRE(agg.flexible.size() == 1);

    std::uint64_t seed = rng.next_u64();
    auto raw_set = generate(res, load, traces, 1, seed);
    auto agg_set = generate(agg, load, traces, 1, seed);
    auto raw = dispatch_optimal(res, raw_set.scenarios[0],
                                raw_set.scenarios[0].load_mw);
    auto merged = dispatch_optimal(agg, agg_set.scenarios[0],
                                   agg_set.scenarios[0].load_mw);
    CHECK(std::fabs(raw.eue_mwh - merged.eue_mwh) <= 1e-6);
  }
}

TEST_CASE("flat flexible units merge into one with summed baseline") {
  TraceStore traces;
  std::size_t T = 4;
  traces.put("b1", std::vector<double>(T, 2.0));
  traces.put("b2", std::vector<double>(T, 3.0));
  traces.put("b3", std::vector<double>(T, 5.0));
  traces.put("c1", std::vector<double>(T, 1.0));
  traces.put("c2", std::vector<double>(T, 1.5));
  traces.put("c3", std::vector<double>(T, 2.0));
  SystemResources res;
  res.horizon = {T, 1.0};
  res.flexible.push_back({"f1", "b1", "c1"});
  res.flexible.push_back({"f2", "b2", "c2"});
  res.flexible.push_back({"f3", "b3", "c3"});
  auto agg = aggregate_classes(res, traces);
  REQUIRE(agg.flexible.size() == 1);
  const auto& base = traces.get(agg.flexible[0].baseline_trace_id);
  const auto& cap = traces.get(agg.flexible[0].reduction_cap_trace_id);
  for (std::size_t t = 0; t < T; ++t) {
    CHECK(base[t] == Catch::Approx(10.0));
    CHECK(cap[t] == Catch::Approx(4.5));
  }
}
