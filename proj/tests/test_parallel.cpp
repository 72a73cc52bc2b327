#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vcount/evaluation.hpp"

using namespace vcount;

namespace {

bool same(const std::optional<double>& a, const std::optional<double>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

}  // namespace

TEST_CASE("parallel replications equal the serial reference") {
  omp_set_num_threads(4);
  ScenarioConfig s = default_scenario();
  s.sampling.lmp = 0.3;
  s.sampling.replications = 40;
  s.detector = DetectorLocation::middle;
  const auto data = prepare(s);
  const auto serial = run_replications(data, s, Execution::serial);
  const auto parallel = run_replications(data, s, Execution::parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(serial[i].result.has_value() == parallel[i].result.has_value());
    CHECK(serial[i].error == parallel[i].error);
    if (!serial[i].result) continue;
    const auto& a = serial[i].result->step_records;
    const auto& b = parallel[i].result->step_records;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].n_post == b[k].n_post);
      CHECK(a[k].p_post == b[k].p_post);
    }
  }
}

TEST_CASE("parallel sweep equals the serial sweep") {
  omp_set_num_threads(3);
  SweepSpec spec;
  spec.base = default_scenario();
  spec.base.sampling.replications = 6;
  spec.axes = {{SweepAxis::lmp, {"0.1", "0.5"}}, {SweepAxis::vc_ratio, {"0.2", "1.1"}}};
  const auto a = sweep(spec, Execution::serial);
  const auto b = sweep(spec, Execution::parallel);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].coords == b.rows[i].coords);
    CHECK(a.rows[i].replication == b.rows[i].replication);
    CHECK(same(a.rows[i].rrmse_pct, b.rows[i].rrmse_pct));
    CHECK(same(a.rows[i].rmse_veh, b.rows[i].rmse_veh));
    CHECK(a.rows[i].error == b.rows[i].error);
  }
}

TEST_CASE("aggregation is permutation-invariant over replications") {
  SweepSpec spec;
  spec.base = default_scenario();
  spec.base.sampling.replications = 12;
  spec.axes = {{SweepAxis::lmp, {"0.3"}}};
  const auto t = sweep(spec, Execution::serial);
  auto rows = t.rows;
  std::mt19937 gen(5);
  std::shuffle(rows.begin(), rows.end(), gen);
  const auto shuffled = aggregate(rows);
  const auto& orig = t.aggregates.front();
  CHECK(shuffled.mean_rrmse_pct == doctest::Approx(orig.mean_rrmse_pct).epsilon(1e-12));
  CHECK(shuffled.pooled_rrmse_pct == doctest::Approx(orig.pooled_rrmse_pct).epsilon(1e-12));
  CHECK(shuffled.mean_dt_s == doctest::Approx(orig.mean_dt_s).epsilon(1e-12));
  CHECK(shuffled.max_dt_s == orig.max_dt_s);
  CHECK(shuffled.defined_runs == orig.defined_runs);
}
