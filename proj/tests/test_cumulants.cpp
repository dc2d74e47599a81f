#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "segsites/cumulants.hpp"
#include "segsites/errors.hpp"
#include "segsites/numeric.hpp"
#include "segsites/special_functions.hpp"

using namespace segsites;
using cumulants::NegBinParams;

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((MutationParams{0.0, 5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MutationParams{-1.0, 5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MutationParams{1.0, 1}.validate()), std::invalid_argument);
  CHECK_NOTHROW((MutationParams{1e-9, 2}.validate()));
  CHECK_THROWS_AS((NegBinParams{0.0, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((NegBinParams{1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((NegBinParams{1.0, 0.0}.validate()));
}

TEST_CASE("poisson and gamma cumulants") {
  for (int j = 1; j <= 8; ++j) {
    CHECK(cumulants::poisson_cumulant(3.25, j) == 3.25);
  }
  // Gamma(alpha, beta): kappa_j = alpha (j-1)! / beta^j.
  CHECK(cumulants::gamma_cumulant(2.0, 0.5, 1) == doctest::Approx(4.0));
  CHECK(cumulants::gamma_cumulant(2.0, 0.5, 2) == doctest::Approx(8.0));
  CHECK(cumulants::gamma_cumulant(2.0, 0.5, 3) == doctest::Approx(32.0));
  CHECK(cumulants::gamma_cumulant(1.5, 2.0, 4) ==
        doctest::Approx(1.5 * 6.0 / 16.0));
  CHECK_THROWS_AS(cumulants::poisson_cumulant(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(cumulants::gamma_cumulant(1.0, 1.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cumulants::gamma_cumulant(-1.0, 1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("negative binomial: three routes and identities") {
  const NegBinParams half{1.0, 0.5};
  CHECK(cumulants::negbin_cumulant(half, 1) == doctest::Approx(1.0));
  CHECK(cumulants::negbin_cumulant(half, 2) == doctest::Approx(2.0));
  CHECK(cumulants::negbin_cumulant(half, 3) == doctest::Approx(6.0));
  for (double a : {0.5, 1.0, 2.0}) {
    for (double p : {0.1, 0.5, 0.9}) {
      const NegBinParams params{a, p};
      CAPTURE(a);
      CAPTURE(p);
      CHECK(relative_difference(cumulants::negbin_cumulant(params, 1),
                                a * p / (1.0 - p)) <= 1e-12);
      CHECK(relative_difference(cumulants::negbin_cumulant(params, 2),
                                a * p / ((1.0 - p) * (1.0 - p))) <= 1e-12);
      for (int i = 1; i <= 8; ++i) {
        const double closed = cumulants::negbin_cumulant(params, i);
        CHECK(relative_difference(
                  closed, cumulants::negbin_cumulant_series(params, i)) <=
              1e-9);
        CHECK(relative_difference(
                  closed, cumulants::negbin_cumulant_partition_sum(params, i)) <=
              1e-10);
      }
    }
  }
  CHECK(cumulants::negbin_cumulant_partition_sum(NegBinParams{2.0, 0.0}, 3) ==
        0.0);
  CHECK_THROWS_AS(
      cumulants::negbin_cumulant_partition_sum(NegBinParams{1.0, 0.5}, 13),
      capacity_error);
}

TEST_CASE("negative binomial: mixing rate and pmf") {
  CHECK(cumulants::negbin_mixing_rate(0.25) == doctest::Approx(3.0));
  CHECK(cumulants::negbin_mixing_rate(0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cumulants::negbin_mixing_rate(0.0), std::domain_error);
  CHECK_THROWS_AS(cumulants::negbin_mixing_rate(1.0), std::domain_error);
  // NB(2, 0.3): P{N=k} = binom(k+1, k) 0.3^k 0.7^2.
  const NegBinParams params{2.0, 0.3};
  CHECK(cumulants::negbin_pmf(params, 0) == doctest::Approx(0.49));
  CHECK(cumulants::negbin_pmf(params, 1) == doctest::Approx(2 * 0.3 * 0.49));
  CHECK(cumulants::negbin_pmf(params, 2) ==
        doctest::Approx(3 * 0.09 * 0.49));
  CompensatedSum total;
  for (std::uint64_t k = 0; k < 200; ++k) {
    total.add(cumulants::negbin_pmf(params, k));
  }
  CHECK(total.value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("level-k geometric cumulants") {
  // G_k ~ NB(1, theta/(k-1+theta)); at theta = 1, k = 2 the failure
  // probability is 1/2.
  CHECK(cumulants::geometric_Gk_cumulant(1.0, 2, 1) == doctest::Approx(1.0));
  CHECK(cumulants::geometric_Gk_cumulant(1.0, 2, 2) == doctest::Approx(2.0));
  CHECK(cumulants::geometric_Gk_cumulant(1.0, 2, 3) == doctest::Approx(6.0));
  for (double theta : {0.5, 2.0}) {
    for (int k : {2, 5, 17}) {
      CHECK(cumulants::geometric_Gk_cumulant(theta, k, 1) ==
            doctest::Approx(theta / (k - 1)));
      const double p = theta / (k - 1 + theta);
      for (int i = 1; i <= 6; ++i) {
        CHECK(cumulants::geometric_Gk_cumulant(theta, k, i) ==
              doctest::Approx(
                  cumulants::negbin_cumulant(NegBinParams{1.0, p}, i)));
      }
    }
  }
  CHECK_THROWS_AS(cumulants::geometric_Gk_cumulant(1.0, 1, 2),
                  std::invalid_argument);
}

TEST_CASE("segregating-site cumulants: fixed points and additivity") {
  const MutationParams geom{1.0, 2};
  CHECK(cumulants::segsites_cumulant(geom, 1) == doctest::Approx(1.0));
  CHECK(cumulants::segsites_cumulant(geom, 2) == doctest::Approx(2.0));
  CHECK(cumulants::segsites_cumulant(geom, 3) == doctest::Approx(6.0));

  const MutationParams watterson{2.0, 10};
  CHECK(cumulants::segsites_mean(watterson) ==
        doctest::Approx(2.0 * oracles::harmonic_exact(9, 1)).epsilon(1e-14));
  CHECK(cumulants::segsites_var(watterson) ==
        doctest::Approx(2.0 * oracles::harmonic_exact(9, 1) +
                        4.0 * oracles::harmonic_exact(9, 2))
            .epsilon(1e-14));

  for (double theta : {0.5, 2.0}) {
    for (int n : {3, 10, 50}) {
      const MutationParams params{theta, n};
      for (int i = 1; i <= 6; ++i) {
        CompensatedSum level_sum;
        for (int k = 2; k <= n; ++k) {
          level_sum.add(cumulants::geometric_Gk_cumulant(theta, k, i));
        }
        CAPTURE(theta);
        CAPTURE(n);
        CAPTURE(i);
        CHECK(relative_difference(level_sum.value(),
                                  cumulants::segsites_cumulant(params, i)) <=
              1e-12);
      }
      const auto vec = cumulants::segsites_cumulants(params, 6);
      REQUIRE(vec.max_order() == 6);
      for (int i = 1; i <= 6; ++i) {
        CHECK(vec.values[static_cast<std::size_t>(i - 1)] ==
              cumulants::segsites_cumulant(params, i));
      }
    }
  }
  CHECK_THROWS_AS(cumulants::segsites_cumulant(MutationParams{1.0, 5}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cumulants::segsites_cumulants(MutationParams{1.0, 5}, 0),
                  std::invalid_argument);
}

TEST_CASE("segregating-site cumulants: corrupted table trips the dual check") {
  auto& table = special::stirling_table();
  table.perturb(3, 2, 1000);
  CHECK_THROWS_AS(cumulants::segsites_cumulant(MutationParams{1.0, 5}, 3),
                  integrity_error);
  table.reset_perturbations();
  CHECK_NOTHROW(cumulants::segsites_cumulant(MutationParams{1.0, 5}, 3));
}

TEST_CASE("pmf: small-n closed forms") {
  // n = 2: geometric with success 1/(1+theta).
  for (double theta : {0.5, 1.0, 2.0}) {
    const MutationParams params{theta, 2};
    const double q = theta / (1.0 + theta);
    for (std::uint64_t m = 0; m <= 30; ++m) {
      const auto r = cumulants::segsites_pmf(params, m);
      CHECK(r.precision_ok);
      CHECK(relative_difference(
                r.value, (1.0 - q) * std::pow(q, static_cast<double>(m))) <=
            1e-12);
    }
  }
  // n = 3, theta = 1: pmf(m) = 2 [(1/2)^{m+1} - (1/3)^{m+1}].
  const MutationParams three{1.0, 3};
  for (std::uint64_t m = 0; m <= 20; ++m) {
    const double want = 2.0 * (std::pow(0.5, static_cast<double>(m + 1)) -
                               std::pow(1.0 / 3.0, static_cast<double>(m + 1)));
    CHECK(relative_difference(cumulants::segsites_pmf(three, m).value, want) <=
          1e-12);
  }
  CHECK(cumulants::segsites_pmf(three, 0).value == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("pmf: cancellation reporting at large n") {
  // Alternating binomial sums with n - 1 = 99 terms lose ~28 digits; the
  // result must be flagged, not silently returned.
  const auto r = cumulants::segsites_pmf(MutationParams{1.0, 100}, 0);
  CHECK_FALSE(r.precision_ok);
  CHECK(r.cancellation > cumulants::kPmfCancellationLimit);
  // Exact value is still known here: P{S_n = 0} = pgf(0).
  const double want = cumulants::segsites_pgf(MutationParams{1.0, 100}, 0.0);
  CHECK(want == doctest::Approx(0.01).epsilon(1e-12));
  const auto ok = cumulants::segsites_pmf(MutationParams{1.0, 10}, 3);
  CHECK(ok.precision_ok);
  CHECK(ok.cancellation < cumulants::kPmfCancellationLimit);
}

TEST_CASE("pmf tail bound: exact at n = 2, dominates the true tail") {
  // n = 2: the bound collapses to the exact geometric tail u^{m+1}.
  for (double theta : {0.5, 1.0, 2.0}) {
    const MutationParams params{theta, 2};
    const double u = theta / (1.0 + theta);
    for (std::uint64_t m : {0, 3, 10, 40}) {
      CHECK(relative_difference(
                cumulants::segsites_pmf_tail_bound(params, m),
                std::pow(u, static_cast<double>(m) + 1.0)) <= 1e-12);
    }
  }
  // Well-conditioned n = 5: the bound sits above the true tail 1 - cdf and
  // decreases monotonically.
  const MutationParams params{1.0, 5};
  CompensatedSum cdf;
  double prev = HUGE_VAL;
  for (std::uint64_t m = 0; m <= 60; ++m) {
    cdf.add(cumulants::segsites_pmf(params, m).value);
    const double bound = cumulants::segsites_pmf_tail_bound(params, m);
    CHECK(bound >= (1.0 - cdf.value()) * (1.0 - 1e-9));
    CHECK(bound <= prev);
    prev = bound;
  }
  CHECK(prev < 1e-15);
  // Large n stays finite (log-space evaluation) and eventually tiny even
  // though the binomials dwarf double range at face value.
  const MutationParams big{1.0, 200};
  CHECK(std::isfinite(cumulants::segsites_pmf_tail_bound(big, 0)));
  CHECK(cumulants::segsites_pmf_tail_bound(big, 500) < 1e-100);
}

TEST_CASE("pgf: product form") {
  CHECK(cumulants::segsites_pgf(MutationParams{3.7, 23}, 1.0) == 1.0);
  for (double theta : {0.5, 1.0, 2.0}) {
    for (double s : {0.0, 0.3, 0.7}) {
      CHECK(cumulants::segsites_pgf(MutationParams{theta, 2}, s) ==
            doctest::Approx(1.0 / (1.0 + theta * (1.0 - s))));
    }
  }
  CHECK(cumulants::segsites_pgf(MutationParams{1.0, 3}, 0.0) ==
        doctest::Approx(1.0 / 3.0));
  // pgf(0) = P{S_n = 0} for moderate n.
  CHECK(cumulants::segsites_pgf(MutationParams{0.5, 8}, 0.0) ==
        doctest::Approx(cumulants::segsites_pmf(MutationParams{0.5, 8}, 0).value)
            .epsilon(1e-10));
  CHECK_THROWS_AS(cumulants::segsites_pgf(MutationParams{1.0, 5}, 3.0),
                  std::domain_error);
}

TEST_CASE("raw moments from cumulants") {
  cumulants::CumulantVector poisson;
  poisson.values = {2.0, 2.0, 2.0, 2.0, 2.0};
  const auto mu = cumulants::moments_from_cumulants(poisson);
  REQUIRE(mu.max_order() == 5);
  for (int j = 1; j <= 5; ++j) {
    CHECK(mu.values[static_cast<std::size_t>(j - 1)] ==
          doctest::Approx(oracles::poisson_raw_moment(2.0, j))
              .epsilon(1e-12));
  }
  cumulants::CumulantVector too_long;
  too_long.values.assign(13, 1.0);
  CHECK_THROWS_AS(cumulants::moments_from_cumulants(too_long), capacity_error);
  cumulants::CumulantVector empty;
  CHECK_THROWS_AS(cumulants::moments_from_cumulants(empty),
                  std::invalid_argument);
}

TEST_CASE("watterson estimator") {
  CHECK(cumulants::watterson_estimator(0, 10) == 0.0);
  CHECK(cumulants::watterson_estimator(7, 2) == doctest::Approx(7.0));
  CHECK(cumulants::watterson_estimator(5, 6) ==
        doctest::Approx(300.0 / 137.0).epsilon(1e-14));
  CHECK_THROWS_AS(cumulants::watterson_estimator(5, 1),
                  std::invalid_argument);
}
