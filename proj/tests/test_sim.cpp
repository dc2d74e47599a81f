#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "segsites/cumulants.hpp"
#include "segsites/numeric.hpp"
#include "segsites/sim.hpp"

using namespace segsites;
using sim::Method;
using sim::SimConfig;

TEST_CASE("method names parse both ways") {
  CHECK(sim::parse_method("GeometricSum") == Method::GeometricSum);
  CHECK(sim::parse_method("geometric-sum") == Method::GeometricSum);
  CHECK(sim::parse_method("EXPONENTIAL_MIXTURE") == Method::ExponentialMixture);
  CHECK(sim::parse_method("full-tree") == Method::FullTree);
  CHECK(sim::parse_method(sim::method_name(Method::FullTree)) ==
        Method::FullTree);
  CHECK_THROWS_AS(sim::parse_method("bogus"), std::invalid_argument);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(
      (SimConfig{MutationParams{1.0, 10}, 0, 1, Method::GeometricSum}
           .validate()),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (SimConfig{MutationParams{1.0, 1}, 10, 1, Method::GeometricSum}
           .validate()),
      std::invalid_argument);
  CHECK_NOTHROW(
      (SimConfig{MutationParams{1.0, 2}, 1, 0, Method::FullTree}.validate()));
}

TEST_CASE("simulation is deterministic in its config") {
  const SimConfig config{MutationParams{1.5, 12}, 4096, 777,
                         Method::GeometricSum};
  const auto a = sim::simulate(config);
  const auto b = sim::simulate(config);
  REQUIRE(a.counts.size() == 4096);
  CHECK(a.counts == b.counts);

  SimConfig other = config;
  other.seed = 778;
  CHECK(sim::simulate(other).counts != a.counts);

  other = config;
  other.method = Method::ExponentialMixture;
  CHECK(sim::simulate(other).counts != a.counts);
}

TEST_CASE("vanishing mutation rate produces almost no sites") {
  for (Method m :
       {Method::GeometricSum, Method::ExponentialMixture, Method::FullTree}) {
    const SimConfig config{MutationParams{1e-9, 20}, 20000, 5, m};
    const auto batch = sim::simulate(config);
    std::uint64_t total = 0;
    for (auto c : batch.counts) total += c;
    CAPTURE(sim::method_name(m));
    CHECK(static_cast<double>(total) / 20000.0 < 1e-6);
  }
}

TEST_CASE("summarize: exact small-batch moments") {
  // {0, 1, 2, 3}: mean 1.5, m2 = 1.25, m3 = 0, m4 = 2.5625.
  const auto s = sim::summarize_counts({0, 1, 2, 3});
  CHECK(s.replicates == 4);
  CHECK(s.mean == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(s.variance == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(s.k3 == doctest::Approx(0.0));
  CHECK(s.k4 == doctest::Approx(2.5625 - 3.0 * 1.25 * 1.25).epsilon(1e-14));
  CHECK(std::isnan(s.se_mean));  // R < 8: no sub-batch spread available
  CHECK(std::isnan(s.se_k4));

  const auto c = sim::summarize_counts({7, 7, 7, 7, 7, 7, 7, 7});
  CHECK(c.mean == 7.0);
  CHECK(c.variance == 0.0);
  CHECK(c.k3 == 0.0);
  CHECK(c.k4 == 0.0);
  CHECK(c.se_mean == 0.0);  // eight identical sub-batches: zero spread

  CHECK_THROWS_AS(sim::summarize_counts({1, 2, 3}), std::invalid_argument);
}

TEST_CASE("summarize matches analytic moments at moderate replicates") {
  const MutationParams params{1.0, 10};
  for (Method m :
       {Method::GeometricSum, Method::ExponentialMixture, Method::FullTree}) {
    const SimConfig config{params, 40000, 2024, m};
    const auto s = sim::summarize(sim::simulate(config));
    CAPTURE(sim::method_name(m));
    CHECK(s.se_mean > 0.0);
    CHECK(std::fabs(s.mean - cumulants::segsites_mean(params)) <
          6.0 * s.se_mean);
    CHECK(std::fabs(s.variance - cumulants::segsites_var(params)) <
          6.0 * s.se_k2);
    CHECK(std::fabs(s.k3 - cumulants::segsites_cumulant(params, 3)) <
          6.0 * s.se_k3);
  }
}

TEST_CASE("cross-method report") {
  const auto report =
      sim::cross_method_check(MutationParams{1.0, 5}, 30000, 99);
  CHECK_FALSE(report.declined);
  REQUIRE(report.comparisons.size() == 3);
  for (const auto& cmp : report.comparisons) {
    CAPTURE(sim::method_name(cmp.a));
    CAPTURE(sim::method_name(cmp.b));
    CHECK(std::fabs(cmp.z_mean) < 4.0);
    CHECK(std::fabs(cmp.z_variance) < 4.0);
    CHECK_FALSE(cmp.flagged);
  }
  const auto degenerate =
      sim::cross_method_check(MutationParams{1.0, 5}, 1, 99);
  CHECK(degenerate.declined);
  CHECK(degenerate.comparisons.empty());
}

TEST_CASE("poisson and gamma-poisson batches hit their moments") {
  const auto p = sim::summarize_counts(sim::poisson_batch(4.0, 50000, 31));
  CHECK(std::fabs(p.mean - 4.0) < 6.0 * p.se_mean);
  CHECK(std::fabs(p.variance - 4.0) < 6.0 * p.se_k2);

  // PTRS branch (lambda >= 10).
  const auto big = sim::summarize_counts(sim::poisson_batch(35.0, 50000, 32));
  CHECK(std::fabs(big.mean - 35.0) < 6.0 * big.se_mean);
  CHECK(std::fabs(big.variance - 35.0) < 6.0 * big.se_k2);

  // Gamma(2, rate 3) mixed Poisson = NB(2, 1/4): mean 2/3, var 8/9.
  const auto nb =
      sim::summarize_counts(sim::gamma_poisson_batch(2.0, 3.0, 50000, 33));
  CHECK(std::fabs(nb.mean - 2.0 / 3.0) < 6.0 * nb.se_mean);
  CHECK(std::fabs(nb.variance - 8.0 / 9.0) < 6.0 * nb.se_k2);

  CHECK_THROWS_AS(sim::poisson_batch(-1.0, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(sim::gamma_poisson_batch(0.0, 1.0, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("batches carry their config") {
  const SimConfig config{MutationParams{2.0, 3}, 16, 9, Method::FullTree};
  const auto batch = sim::simulate(config);
  CHECK(batch.config.seed == 9);
  CHECK(batch.config.method == Method::FullTree);
  CHECK(batch.counts.size() == 16);
  const auto s = sim::summarize(batch);
  CHECK(s.replicates == 16);
}
