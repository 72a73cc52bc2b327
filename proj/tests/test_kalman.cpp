#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle/reference_filter.hpp"
#include "vcount/errors.hpp"
#include "vcount/kalman.hpp"

using namespace vcount;

namespace {

IntervalObservation obs(std::int64_t a_p, std::int64_t d_p, double dt = 60.0,
                        std::optional<double> tt = std::nullopt,
                        std::optional<double> rho = std::nullopt) {
  IntervalObservation o;
  o.t_end = dt;
  o.dt = dt;
  o.a_p = a_p;
  o.d_p = d_p;
  o.tt_mean = tt;
  o.rho_interval = rho;
  return o;
}

FilterConfig raw(double rho, double rho_min) {
  FilterConfig c;
  c.rho_fixed = rho;
  c.rho_min = rho_min;
  c.clamp_nonnegative = false;
  return c;
}

}  // namespace

TEST_CASE("predict reproduces the worked low-penetration example") {
  const FilterState s{5.0, 5.0, 0};
  CHECK(predict(s, obs(6, 5), raw(0.1, 0.0)).n == 15.0);
  CHECK(predict(s, obs(6, 5), raw(0.1, 0.5)).n == 7.0);
  CHECK(predict(s, obs(6, 5), raw(0.1, 0.5)).p == 5.0);
}

TEST_CASE("predict with bound inactive") {
  const FilterState s{10.0, 1.0, 0};
  CHECK(predict(s, obs(8, 4), raw(0.8, 0.5)).n == doctest::Approx(15.0).epsilon(1e-15));
}

TEST_CASE("zero net probe flow leaves the count unchanged") {
  const FilterState s{12.25, 3.0, 0};
  for (int k : {0, 1, 7}) CHECK(predict(s, obs(k, k), raw(0.3, 0.5)).n == 12.25);
}

TEST_CASE("interval rho overrides the historical value") {
  const FilterState s{0.0, 1.0, 0};
  CHECK(predict(s, obs(3, 1, 60, std::nullopt, 0.8), raw(0.2, 0.5)).n == doctest::Approx(2.5));
}

TEST_CASE("predict clamps at zero when asked") {
  FilterConfig c = raw(0.5, 0.5);
  const FilterState s{1.0, 1.0, 0};
  CHECK(predict(s, obs(0, 5), c).n == doctest::Approx(-9.0));
  c.clamp_nonnegative = true;
  CHECK(predict(s, obs(0, 5), c).n == 0.0);
}

TEST_CASE("measurement vector") {
  CHECK(measurement_vector(obs(5, 5, 60.0), raw(0.5, 0.5)) == doctest::Approx(6.0));
  CHECK(measurement_vector(obs(1, 1, 10.0), raw(1.0, 0.5)) == 10.0);
  // no floor on rho inside H
  CHECK(measurement_vector(obs(1, 1, 10.0), raw(0.1, 0.5)) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)measurement_vector(obs(0, 0), raw(0.5, 0.5)), MeasurementUnavailable);
}

TEST_CASE("update against hand-computed scalar KF") {
  FilterConfig c = raw(0.5, 0.5);
  c.r_meas = 5.0;
  const auto u = update({7.0, 5.0}, 10.0, 80.0, c);
  CHECK(u.gain == doctest::Approx(50.0 / 505.0).epsilon(1e-14));
  CHECK(u.tt_prior == doctest::Approx(70.0));
  CHECK(u.state.n_hat == doctest::Approx(7.0 + 500.0 / 505.0).epsilon(1e-14));
  CHECK(u.state.p_hat == doctest::Approx(25.0 / 505.0).epsilon(1e-14));
}

TEST_CASE("update limits") {
  FilterConfig c = raw(0.5, 0.5);
  SUBCASE("perfect measurement") {
    c.r_meas = 0.0;
    const auto u = update({3.0, 2.0}, 7.0, 50.0, c);
    CHECK(u.gain == 1.0 / 7.0);
    CHECK(u.state.n_hat == 50.0 / 7.0);
    CHECK(u.state.p_hat == 0.0);
  }
  SUBCASE("perfect prior") {
    c.r_meas = 5.0;
    const auto u = update({3.0, 0.0}, 7.0, 50.0, c);
    CHECK(u.gain == 0.0);
    CHECK(u.state.n_hat == 3.0);
    CHECK(u.state.p_hat == 0.0);
  }
  SUBCASE("degenerate") {
    c.r_meas = 0.0;
    CHECK_THROWS_AS((void)update({3.0, 0.0}, 7.0, 50.0, c), DegenerateFilter);
  }
}

TEST_CASE("config validation") {
  FilterConfig c;
  CHECK_NOTHROW(c.validate());
  c.rho_fixed = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.rho_fixed = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  c.r_meas = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  c.p0 = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  c.rho_min = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FilterConfig{};
  CHECK_THROWS_AS((void)predict({}, obs(1, 1, 10, std::nullopt, 0.0), c), ConfigError);
}

TEST_CASE("step policies for a missing measurement") {
  FilterConfig c = raw(0.5, 0.5);
  const FilterState s{4.0, 5.0, 2};
  SUBCASE("predict_only commits the prior") {
    c.missing_policy = MissingPolicy::predict_only;
    const auto out = step(s, obs(3, 1), c);
    CHECK(out.state.n_hat == doctest::Approx(8.0));
    CHECK(out.state.p_hat == 5.0);
    CHECK(out.state.step == 3);
    CHECK(out.record.defined());
    CHECK(out.record.n_post == out.record.n_prior);
  }
  SUBCASE("paper_nan marks the step undefined") {
    const auto out = step(s, obs(3, 1), c);
    CHECK_FALSE(out.record.defined());
    CHECK(std::isnan(out.record.n_post));
    CHECK(out.state.step == 3);
  }
  SUBCASE("no probes at all") {
    const auto out = step(s, obs(0, 0, 20.0, 30.0), c);
    CHECK_FALSE(out.record.defined());
  }
}

TEST_CASE("CountFilter matches the straight-line oracle over three steps") {
  FilterConfig c;
  c.rho_fixed = 0.3;
  c.rho_min = 0.5;
  c.r_meas = 5.0;
  c.n0 = 5.0;
  c.p0 = 5.0;
  c.clamp_nonnegative = true;
  const std::vector<IntervalObservation> seq = {
      obs(4, 5, 42.0, 21.5), obs(7, 5, 35.0, 19.0, 0.4), obs(2, 6, 58.5, 33.25)};
  std::vector<oracle::Obs> ref;
  for (const auto& o : seq)
    ref.push_back({o.t_end, o.dt, double(o.a_p), double(o.d_p), *o.tt_mean,
                   o.rho_interval.value_or(c.rho_fixed), 0.0});
  const auto rows = oracle::run_filter(ref, c.rho_min, c.r_meas, c.n0, c.p0, true);

  CountFilter f(c);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto rec = f.step(seq[i]);
    CHECK(rec.step == static_cast<std::int64_t>(i + 1));
    CHECK(oracle::close(rec.n_prior, rows[i].n_prior, 1e-12));
    CHECK(oracle::close(rec.h, rows[i].h, 1e-12));
    CHECK(oracle::close(rec.gain, rows[i].gain, 1e-12));
    CHECK(oracle::close(rec.n_post, rows[i].n_post, 1e-12));
    CHECK(oracle::close(rec.p_post, rows[i].p_post, 1e-12));
  }
}

TEST_CASE("property: gain, covariance and betweenness bounds") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FilterConfig c = raw(0.5, 0.5);
  for (int i = 0; i < 20000; ++i) {
    const double p = u(gen) < 0.05 ? 0.0 : std::exp(8 * u(gen) - 4);
    const double h = std::exp(6 * u(gen) - 3);
    c.r_meas = u(gen) < 0.05 ? 0.0 : std::exp(8 * u(gen) - 4);
    if (p == 0.0 && c.r_meas == 0.0) continue;
    const double n = 60 * u(gen) - 10;
    const double tt = 200 * u(gen) + 1e-3;
    const auto r = update({n, p}, h, tt, c);
    REQUIRE(r.gain >= 0.0);
    REQUIRE(r.gain <= 1.0 / h);
    REQUIRE(r.state.p_hat >= 0.0);
    REQUIRE(r.state.p_hat <= p);
    REQUIRE(r.state.n_hat >= std::min(n, tt / h));
    REQUIRE(r.state.n_hat <= std::max(n, tt / h));
  }
}

TEST_CASE("property: rho below the floor acts as the floor") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    FilterConfig c = raw(0.5, 0.2 + 0.8 * u(gen));
    const double below = c.rho_min * (0.01 + 0.98 * u(gen));
    const FilterState s{30 * u(gen), 1.0, 0};
    const auto o = obs(std::int64_t(10 * u(gen)), std::int64_t(10 * u(gen)));
    c.rho_fixed = below;
    const double a = predict(s, o, c).n;
    c.rho_fixed = c.rho_min;
    REQUIRE(a == predict(s, o, c).n);
  }
}
