#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "segsites/errors.hpp"
#include "segsites/numeric.hpp"
#include "segsites/special_functions.hpp"

using namespace segsites;
using special::BigInt;

TEST_CASE("stirling numbers: known values") {
  CHECK(special::stirling2(0, 0) == 1);
  CHECK(special::stirling2(1, 0) == 0);
  CHECK(special::stirling2(4, 2) == 7);
  CHECK(special::stirling2(5, 3) == 25);
  CHECK(special::stirling2(8, 3) == 966);
  CHECK(special::stirling2(10, 5) == 42525);
  // {n, 2} = 2^{n-1} - 1 and {n, n-1} = C(n, 2) exactly, including rows far
  // past double precision.
  CHECK(special::stirling2(64, 2) == (BigInt(1) << 63) - 1);
  CHECK(special::stirling2(64, 63) == 64 * 63 / 2);
  CHECK(special::stirling2(12, 20) == 0);  // k > n
  CHECK(special::stirling2_d(4, 2) == 7.0);
}

TEST_CASE("stirling numbers: capacity and argument guards") {
  CHECK_THROWS_AS(special::stirling2(special::kMaxStirlingN + 1, 2),
                  capacity_error);
  CHECK_THROWS_AS(special::stirling2(-1, 0), std::out_of_range);
  CHECK_THROWS_AS(special::stirling2(3, -1), std::out_of_range);
}

TEST_CASE("stirling numbers: perturbation hook is visible and reversible") {
  auto& table = special::stirling_table();
  const BigInt before = table.stirling2(8, 3);
  table.perturb(8, 3, 966);
  CHECK(table.stirling2(8, 3) == before + 966);
  table.reset_perturbations();
  CHECK(table.stirling2(8, 3) == before);
  CHECK_THROWS_AS(table.perturb(200, 1, 1), std::out_of_range);
}

TEST_CASE("set partitions: exhaustive cross-check and ordering contract") {
  for (int d = 1; d <= 6; ++d) {
    const auto expected = oracles::partitions_exhaustive(d);
    const auto got = special::set_partitions(d);
    CHECK(got.size() == expected.size());
    std::set<special::SetPartition> got_set(got.begin(), got.end());
    CHECK(got_set.size() == got.size());  // no duplicates
    for (const auto& p : expected) CHECK(got_set.count(p) == 1);
  }
}

TEST_CASE("set partitions: bell numbers and capacity") {
  const long long bell[] = {1,    1,     2,     5,      15,     52,    203,
                            877,  4140,  21147, 115975, 678570, 4213597};
  for (int d = 0; d <= 12; ++d) {
    CHECK(special::bell_number(d) == bell[d]);
  }
  long long count = 0;
  special::for_each_set_partition(9, [&](const special::SetPartition&) {
    ++count;
  });
  CHECK(count == 21147);
  CHECK_THROWS_AS(special::set_partitions(13), capacity_error);
  CHECK_THROWS_AS(special::set_partitions(0), capacity_error);
}

TEST_CASE("harmonic numbers: exact rational agreement") {
  CHECK_THROWS_AS(special::harmonic(0, 1), std::invalid_argument);
  CHECK(special::harmonic(1, 1) == 1.0);
  CHECK(special::harmonic(4, 2) ==
        doctest::Approx(205.0 / 144.0).epsilon(1e-15));
  CHECK(special::harmonic(9, 1) ==
        doctest::Approx(7129.0 / 2520.0).epsilon(1e-15));
  for (int b = 1; b <= 4; ++b) {
    for (int n : {2, 7, 10, 100, 1000, 10000}) {
      const double got = special::harmonic(static_cast<std::uint64_t>(n), b);
      const double want = oracles::harmonic_exact(n, b);
      CHECK(relative_difference(got, want) <= 1e-12);
    }
  }
  CHECK(special::harmonic(1000, 1) > special::harmonic(999, 1));
  CHECK_THROWS_AS(special::harmonic(10, 0), std::invalid_argument);
}

TEST_CASE("zeta: classic values and tail behaviour") {
  const double pi = std::numbers::pi;
  CHECK(relative_difference(special::zeta_int(2), pi * pi / 6.0) <= 1e-12);
  CHECK(relative_difference(special::zeta_int(3), 1.2020569031595942854) <=
        1e-12);
  CHECK(relative_difference(special::zeta_int(4), pi * pi * pi * pi / 90.0) <=
        1e-12);
  // zeta(b) - H_N^(b) must sit inside the integral bracket
  // ((N+1)^{1-b}/(b-1), N^{1-b}/(b-1)).
  const double diff = special::zeta_int(3) - special::harmonic(1000, 3);
  CHECK(diff > 0.5 / (1001.0 * 1001.0));
  CHECK(diff < 0.5 / (1000.0 * 1000.0));
  CHECK_THROWS_AS(special::zeta_int(1), std::invalid_argument);
  CHECK_THROWS_AS(special::zeta_int(2, -1.0), std::invalid_argument);
}

TEST_CASE("polylog closed form: exact rational oracle, including u = -0.9") {
  // The rational oracle covers the alternating u < 0 region where the
  // double-precision series comparison is ill-conditioned; the closed form
  // must stay accurate there anyway.
  for (int n = 0; n <= 10; ++n) {
    for (double u : {-0.9, -0.5, -0.1, 0.1, 0.25, 0.5, 0.9}) {
      const double got = special::polylog_neg_closed(n, u);
      const double want = oracles::polylog_neg_exact(n, u);
      CAPTURE(n);
      CAPTURE(u);
      CHECK(relative_difference(got, want) <= 1e-12);
    }
  }
  CHECK(special::polylog_neg_closed(0, 0.5) == doctest::Approx(1.0));
  CHECK(special::polylog_neg_closed(1, 0.5) == doctest::Approx(2.0));
  CHECK(special::polylog_neg_closed(2, 0.5) == doctest::Approx(6.0));
  CHECK(special::polylog_neg_closed(3, 0.25) ==
        doctest::Approx(oracles::polylog_neg_exact(3, 0.25)).epsilon(1e-13));
}

TEST_CASE("polylog series: agreement and stopping rules") {
  for (int n = 0; n <= 10; ++n) {
    for (double u : {-0.5, -0.1, 0.1, 0.5, 0.9}) {
      const double closed = special::polylog_neg_closed(n, u);
      const double series = special::polylog_neg_series(n, u);
      CAPTURE(n);
      CAPTURE(u);
      CHECK(relative_difference(closed, series) <= 1e-9);
    }
  }
  CHECK(special::polylog_neg_series(5, 0.0) == 0.0);
  // rel_tol is honored: a loose tolerance gives a visibly truncated sum.
  const double loose = special::polylog_neg_series(0, 0.5, 1e-3);
  CHECK(relative_difference(loose, 1.0) <= 1e-2);
  CHECK_THROWS_AS(special::polylog_neg_series(2, 0.5, 0.0),
                  std::invalid_argument);
  // Terms of l^10 u^l grow until l ~ 10/(1-u); pushed past the hard cap the
  // series must refuse rather than return a partial sum.
  CHECK_THROWS_AS(special::polylog_neg_series(10, 0.9999999),
                  truncation_error);
}

TEST_CASE("polylog argument domain") {
  CHECK_THROWS_AS(special::polylog_neg_closed(-1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(special::polylog_neg_closed(2, 1.0), std::domain_error);
  CHECK_THROWS_AS(special::polylog_neg_closed(2, -1.0), std::domain_error);
  CHECK_THROWS_AS(special::polylog_neg_series(2, 1.5), std::domain_error);
  CHECK_THROWS_AS(special::polylog_neg_fd_recursion(2, 0.9999, 1e-3),
                  std::domain_error);
}

TEST_CASE("polylog derivative recursion via finite differences") {
  for (int n = 0; n <= 6; ++n) {
    for (double u : {-0.5, -0.1, 0.1, 0.5, 0.9}) {
      const double h = 3e-5 * (1.0 - std::fabs(u));
      const double fd = special::polylog_neg_fd_recursion(n, u, h);
      const double want = special::polylog_neg_closed(n + 1, u);
      CAPTURE(n);
      CAPTURE(u);
      CHECK(relative_difference(fd, want) <= 1e-5);
    }
  }
}
