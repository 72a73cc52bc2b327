#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracle/reference_filter.hpp"
#include "vcount/approach_sim.hpp"
#include "vcount/errors.hpp"
#include "vcount/probe_sampler.hpp"
#include "vcount/schedule.hpp"

using namespace vcount;

namespace {

VehicleRecord veh(std::int64_t id, double entry, std::optional<double> exit, bool probe) {
  return {id, entry, exit, probe};
}

ScheduleConfig variable(std::int64_t n, double t_end = 1000.0) {
  ScheduleConfig c;
  c.mode = IntervalMode::variable;
  c.n_sample = n;
  c.t_start = 0.0;
  c.t_end = t_end;
  return c;
}

EventLog random_log(std::uint64_t seed, int n) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EventLog log;
  for (int i = 0; i < n; ++i) {
    const double entry = 100 * u(gen);
    std::optional<double> exit;
    if (u(gen) < 0.8) exit = entry + 1 + 30 * u(gen);
    log.push_back(veh(i, entry, exit, u(gen) < 0.5));
  }
  return log;
}

}  // namespace

TEST_CASE("variable intervals close at every n-th probe exit") {
  EventLog log;
  for (int i = 1; i <= 5; ++i) log.push_back(veh(i, 10.0 * i - 5, 10.0 * i, true));
  const auto obs = schedule(log, variable(2));
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].t_end == 20.0);
  CHECK(obs[1].t_end == 40.0);
  CHECK(obs[0].dt == 20.0);
  CHECK(obs[1].dt == 20.0);
  CHECK(obs[0].d_p == 2);
  CHECK(obs[0].a_p == 2);
  CHECK(*obs[0].tt_mean == doctest::Approx(5.0));
}

TEST_CASE("n = 1 gives one interval per probe exit") {
  EventLog log = {veh(1, 0.5, 3.0, true), veh(2, 1.0, 7.5, true), veh(3, 2.0, 12.0, true),
                  veh(4, 2.5, 9.0, false)};
  const auto obs = schedule(log, variable(1));
  REQUIRE(obs.size() == 3);
  CHECK(obs[0].dt == 3.0);
  CHECK(obs[1].dt == 4.5);
  CHECK(obs[2].dt == 4.5);
  for (const auto& o : obs) CHECK(o.d_p == 1);
}

TEST_CASE("tied probe exits join the closing interval") {
  EventLog log = {veh(1, 0, 10.0, true), veh(2, 1, 20.0, true), veh(3, 2, 20.0, true),
                  veh(4, 3, 30.0, true), veh(5, 4, 40.0, true)};
  const auto obs = schedule(log, variable(2));
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].t_end == 20.0);
  CHECK(obs[0].d_p == 3);
  CHECK(obs[1].d_p == 2);
}

TEST_CASE("probes entering before the window still close intervals") {
  EventLog log = {veh(1, 5.0, 60.0, true), veh(2, 55.0, 70.0, true)};
  ScheduleConfig c = variable(1);
  c.t_start = 50.0;
  const auto obs = schedule(log, c);
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].dt == 10.0);
  CHECK(obs[0].a_p == 1);
  CHECK(*obs[0].tt_mean == 55.0);
}

TEST_CASE("edge cases") {
  CHECK(schedule({}, variable(5)).empty());
  EventLog no_probes = {veh(1, 0, 5.0, false)};
  CHECK_THROWS_AS((void)schedule(no_probes, variable(1)), NoProbesError);
  ScheduleConfig bad = variable(0);
  CHECK_THROWS_AS((void)schedule(no_probes, bad), ConfigError);
  EventLog dup = {veh(1, 0, 5.0, true), veh(1, 1, 6.0, true)};
  CHECK_THROWS_AS((void)schedule(dup, variable(1)), DataError);
}

TEST_CASE("fixed intervals tile the window") {
  const auto log = random_log(3, 60);
  ScheduleConfig c;
  c.mode = IntervalMode::fixed;
  c.fixed_dt = 7.0;
  c.t_start = 0.0;
  c.t_end = 100.0;
  const auto obs = schedule(log, c);
  REQUIRE(obs.size() == 15);
  double t = 0.0;
  for (const auto& o : obs) {
    CHECK(o.t_end - o.dt == doctest::Approx(t));
    CHECK(o.dt > 0.0);
    CHECK(o.tt_mean.has_value() == (o.d_p > 0));
    t = o.t_end;
  }
  CHECK(t == 100.0);
  CHECK(obs.back().dt == doctest::Approx(2.0));
}

TEST_CASE("variable mode matches brute-force interval construction") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto log = random_log(seed, 40);
    const int n = 1 + static_cast<int>(seed % 4);
    std::vector<IntervalObservation> obs;
    try {
      obs = schedule(log, variable(n, 200.0));
    } catch (const NoProbesError&) {
      continue;
    }
    const auto ref = oracle::variable_intervals(log, n, 0.0, 200.0, 0, 0.5);
    REQUIRE(obs.size() == ref.size());
    std::int64_t total_dp = 0;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      CHECK(obs[k].t_end == ref[k].t_end);
      CHECK(obs[k].dt == ref[k].dt);
      CHECK(double(obs[k].a_p) == ref[k].a_p);
      CHECK(double(obs[k].d_p) == ref[k].d_p);
      CHECK(*obs[k].tt_mean == doctest::Approx(ref[k].tt).epsilon(1e-12));
      CHECK(obs[k].dt > 0.0);
      CHECK(obs[k].d_p >= n);
      total_dp += obs[k].d_p;
    }
    CHECK(total_dp >= n * static_cast<std::int64_t>(obs.size()));
  }
}

TEST_CASE("ground truth counts") {
  EventLog one = {veh(1, 5.0, 15.0, false)};
  const std::vector<double> t = {10.0, 20.0, 5.0, 15.0};
  const auto c = ground_truth_counts(one, t);
  CHECK(c == std::vector<std::int64_t>{1, 0, 1, 0});
  CHECK(ground_truth_counts({}, t) == std::vector<std::int64_t>(4, 0));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto log = random_log(seed, 20);
    std::vector<double> b;
    for (int i = 0; i <= 140; ++i) b.push_back(i * 1.0);
    const auto got = ground_truth_counts(log, b);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(got[i] == oracle::count_on_approach(log, b[i]));
  }
}

TEST_CASE("interval counts respond to penetration and sample size") {
  DemandProfile dem;
  dem.seed = 11;
  const auto truth = simulate({}, {}, dem);
  std::size_t prev = 0;
  // One uniform draw per vehicle: the same seed gives nested probe sets across lmp.
  for (double lmp : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto tagged = tag(truth, lmp, 99);
    const auto obs = schedule(tagged, variable(5, dem.duration_s));
    CHECK(obs.size() >= prev);
    prev = obs.size();
  }
  const auto tagged = tag(truth, 0.5, 99);
  double prev_dt = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const auto obs = schedule(tagged, variable(n, dem.duration_s));
    double sum = 0.0;
    for (const auto& o : obs) sum += o.dt;
    const double mean_dt = sum / static_cast<double>(obs.size());
    CHECK(mean_dt >= prev_dt);
    prev_dt = mean_dt;
  }
}
