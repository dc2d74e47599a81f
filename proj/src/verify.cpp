#include "segsites/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "segsites/asymptotics.hpp"
#include "segsites/cumulants.hpp"
#include "segsites/errors.hpp"
#include "segsites/fixtures.hpp"
#include "segsites/kernels.hpp"
#include "segsites/numeric.hpp"
#include "segsites/rng.hpp"
#include "segsites/sim.hpp"
#include "segsites/special_functions.hpp"

namespace segsites::verify {

namespace {

// A check throws CheckFailure (or any exception) to fail; the string it
// returns on success becomes the report detail.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void require(bool ok, const std::string& detail) {
  if (!ok) throw CheckFailure(detail);
}

void require_rel(double got, double want, double tol, const std::string& what) {
  const double diff = relative_difference(got, want);
  require(diff <= tol, what + ": got " + fmt(got) + ", want " + fmt(want) +
                           " (relative " + fmt(diff) + " > " + fmt(tol) + ")");
}

// Exact-rational generalized harmonic oracle, independent of the library's
// floating-point accumulation.
double harmonic_rational(int n, int b) {
  namespace mp = boost::multiprecision;
  mp::cpp_rational sum = 0;
  for (int k = 1; k <= n; ++k) {
    mp::cpp_int den = 1;
    for (int i = 0; i < b; ++i) den *= k;
    sum += mp::cpp_rational(1, den);
  }
  return sum.convert_to<double>();
}

// ---------------------------------------------------------------------------
// Shared Monte Carlo state, memoized so the mean/variance and k3/k4 checks
// (and repeated acceptance invocations) reuse one batch per grid cell.

constexpr int kGridN[4] = {2, 5, 10, 50};
constexpr double kGridTheta[3] = {0.5, 1.0, 2.0};
constexpr std::size_t kGridReplicates = 1'000'000;

std::uint64_t cell_seed(int n, int theta_idx, int method_idx) {
  return fixtures::kMcSeed + 1000ull * static_cast<std::uint64_t>(n) +
         10ull * static_cast<std::uint64_t>(theta_idx) +
         static_cast<std::uint64_t>(method_idx);
}

const sim::SummaryStats& grid_summary(int n_idx, int theta_idx,
                                      int method_idx) {
  static std::map<std::tuple<int, int, int>, sim::SummaryStats> cache;
  const auto key = std::make_tuple(n_idx, theta_idx, method_idx);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const sim::SimConfig config{
        MutationParams{kGridTheta[theta_idx], kGridN[n_idx]},
        kGridReplicates,
        cell_seed(kGridN[n_idx], theta_idx, method_idx),
        static_cast<sim::Method>(method_idx)};
    it = cache.emplace(key, sim::summarize(sim::simulate(config))).first;
  }
  return it->second;
}

const asymptotics::CltCheckReport& clt_report() {
  static const asymptotics::CltCheckReport report =
      asymptotics::monte_carlo_clt_check(1.0, 1000, 1'000'000,
                                         fixtures::kMcSeed);
  return report;
}

// Total variation between an empirical batch and an analytic pmf, truncated
// where the analytic cumulative reaches 1 - tail_cutoff; the un-enumerated
// analytic tail is added back as pure discrepancy.
double total_variation(const std::vector<std::uint64_t>& counts,
                       const std::function<double(std::uint64_t)>& pmf,
                       double tail_cutoff) {
  std::uint64_t max_count = 0;
  for (std::uint64_t c : counts) max_count = std::max(max_count, c);
  std::vector<double> hist(max_count + 1, 0.0);
  const double r = static_cast<double>(counts.size());
  for (std::uint64_t c : counts) hist[c] += 1.0 / r;

  CompensatedSum half_l1;
  double cumulative = 0.0;
  std::uint64_t m = 0;
  while (cumulative < 1.0 - tail_cutoff) {
    if (m > 10'000'000) {
      throw CheckFailure("analytic pmf failed to accumulate to 1 - " +
                         fmt(tail_cutoff));
    }
    const double p = std::max(0.0, pmf(m));
    const double p_hat = m <= max_count ? hist[m] : 0.0;
    half_l1.add(std::fabs(p_hat - p));
    cumulative += p;
    ++m;
  }
  for (std::uint64_t j = m; j <= max_count; ++j) half_l1.add(hist[j]);
  return 0.5 * (half_l1.value() + (1.0 - cumulative));
}

// Two-sample chi-square on binned counts (equal sample sizes): bins are
// pooled from the top until each holds at least 10 pooled observations;
// statistic sum (a-b)^2/(a+b), df = bins - 1.
double two_sample_chi_square_p(const std::vector<std::uint64_t>& a,
                               const std::vector<std::uint64_t>& b) {
  std::uint64_t max_count = 0;
  for (std::uint64_t c : a) max_count = std::max(max_count, c);
  for (std::uint64_t c : b) max_count = std::max(max_count, c);
  std::vector<double> ha(max_count + 1, 0.0);
  std::vector<double> hb(max_count + 1, 0.0);
  for (std::uint64_t c : a) ha[c] += 1.0;
  for (std::uint64_t c : b) hb[c] += 1.0;

  double chi2 = 0.0;
  int bins = 0;
  double pa = 0.0;
  double pb = 0.0;
  for (std::uint64_t m = 0; m <= max_count; ++m) {
    pa += ha[m];
    pb += hb[m];
    const bool last = (m == max_count);
    if (pa + pb >= 10.0 && !last) {
      chi2 += (pa - pb) * (pa - pb) / (pa + pb);
      ++bins;
      pa = pb = 0.0;
    } else if (last && pa + pb > 0.0) {
      chi2 += (pa - pb) * (pa - pb) / (pa + pb);
      ++bins;
    }
  }
  require(bins >= 2, "chi-square needs at least two bins");
  return boost::math::gamma_q((bins - 1) / 2.0, chi2 / 2.0);
}

// ---------------------------------------------------------------------------
// Fast checks (identities, no Monte Carlo)

std::string check_stirling_recurrence() {
  const auto& table = special::stirling_table();
  for (int n = 1; n <= table.max_n(); ++n) {
    for (int k = 1; k <= n; ++k) {
      const special::BigInt expect =
          table.stirling2(n - 1, k - 1) + k * table.stirling2(n - 1, k);
      require(table.stirling2(n, k) == expect,
              "recurrence violated at {" + std::to_string(n) + ", " +
                  std::to_string(k) + "}");
    }
    require(table.stirling2(n, 0) == 0, "{n, 0} must be 0 for n >= 1");
  }
  // Row sums against Bell numbers from the independent Peirce triangle.
  std::vector<special::BigInt> row{1};
  require(special::bell_number(0) == 1, "Bell(0)");
  for (int n = 1; n <= table.max_n(); ++n) {
    std::vector<special::BigInt> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (const auto& v : row) next.push_back(next.back() + v);
    require(special::bell_number(n) == next.front(),
            "Bell(" + std::to_string(n) + ") disagrees with Peirce triangle");
    row = std::move(next);
  }
  require(special::bell_number(3) == 5 && special::bell_number(4) == 15 &&
              special::bell_number(12) == 4213597,
          "known Bell values");
  return "recurrence and Bell row sums hold through n = " +
         std::to_string(table.max_n());
}

std::string check_stirling_partition_counts() {
  for (int d = 1; d <= 8; ++d) {
    std::vector<long long> by_blocks(static_cast<std::size_t>(d) + 1, 0);
    long long total = 0;
    special::for_each_set_partition(d, [&](const special::SetPartition& p) {
      ++by_blocks[p.size()];
      ++total;
      // Every element exactly once, blocks ordered by least member.
      int seen = 0;
      int prev_least = -1;
      for (const auto& block : p) {
        require(!block.empty() && block.front() > prev_least,
                "blocks must be ordered by least member");
        prev_least = block.front();
        seen += static_cast<int>(block.size());
      }
      require(seen == d, "partition must cover the set");
    });
    require(special::bell_number(d) == total,
            "enumeration count != Bell(" + std::to_string(d) + ")");
    for (int k = 1; k <= d; ++k) {
      require(special::stirling2(d, k) == by_blocks[static_cast<std::size_t>(k)],
              "enumerated block counts != {" + std::to_string(d) + ", " +
                  std::to_string(k) + "}");
    }
  }
  return "enumeration matches Stirling counts through d = 8";
}

std::string check_stirling_examples() {
  require(special::stirling2(0, 0) == 1, "{0,0} = 1");
  require(special::stirling2(3, 2) == 3, "{3,2} = 3");
  require(special::stirling2(4, 2) == 7, "{4,2} = 7");
  bool threw = false;
  try {
    special::stirling2(special::kMaxStirlingN + 1, 1);
  } catch (const capacity_error&) {
    threw = true;
  }
  require(threw, "capacity error past the table limit");
  return "fixed values and capacity guard";
}

std::string check_harmonic_values() {
  require(special::harmonic(1, 1) == 1.0, "H_1 = 1");
  require_rel(special::harmonic(9, 1), harmonic_rational(9, 1), 1e-14,
              "H_9 vs exact rational");
  require_rel(special::harmonic(4, 2), harmonic_rational(4, 2), 1e-14,
              "H_4^(2) vs exact rational");
  double worst = 0.0;
  for (int b = 1; b <= 4; ++b) {
    for (int n : {10, 100, 1000}) {
      worst = std::max(worst,
                       relative_difference(special::harmonic(
                                               static_cast<std::uint64_t>(n), b),
                                           harmonic_rational(n, b)));
    }
  }
  require(worst <= 1e-12, "harmonic vs rational worst " + fmt(worst));
  require(special::harmonic(100, 1) > special::harmonic(99, 1),
          "H_n nondecreasing in n");
  return "rational-oracle agreement, worst relative " + fmt(worst);
}

std::string check_zeta_values() {
  const double pi = std::numbers::pi;
  require_rel(special::zeta_int(2), pi * pi / 6.0, 1e-12, "zeta(2)");
  require_rel(special::zeta_int(4), pi * pi * pi * pi / 90.0, 1e-12,
              "zeta(4)");
  const double diff = special::zeta_int(2) - special::harmonic(1'000'000, 2);
  require(diff > 0.0 && diff < 1.1e-6,
          "zeta(2) - H_1e6^(2) = " + fmt(diff) + ", expected ~1e-6 tail");
  return "zeta(2), zeta(4), and the 1/n tail bound";
}

std::string check_polylog_closed_vs_series() {
  require_rel(special::polylog_neg_closed(0, 0.5), 1.0, 1e-12,
              "Li_0(1/2) = 1");
  require_rel(special::polylog_neg_closed(1, 0.5), 2.0, 1e-12,
              "Li_{-1}(1/2) = 2");
  require_rel(special::polylog_neg_closed(2, 0.5), 6.0, 1e-12,
              "Li_{-2}(1/2) = 6");
  double worst = 0.0;
  int worst_n = 0;
  double worst_u = 0.0;
  // u = -0.9 is deliberately absent: for n >= 4 the alternating series
  // cancels so violently that double precision cannot reach 1e-9 there
  // (the closed form stays exact; the unit tests pin it against rational
  // arithmetic at u = -0.9 instead).
  for (int n = 0; n <= 10; ++n) {
    for (double u : {-0.5, -0.1, 0.1, 0.25, 0.5, 0.9}) {
      const double closed = special::polylog_neg_closed(n, u);
      const double series = special::polylog_neg_series(n, u);
      const double diff = relative_difference(closed, series);
      if (diff > worst) {
        worst = diff;
        worst_n = n;
        worst_u = u;
      }
    }
  }
  require(worst <= 1e-9, "closed vs series worst " + fmt(worst) + " at n = " +
                             std::to_string(worst_n) + ", u = " + fmt(worst_u));
  return "closed form vs series, worst relative " + fmt(worst);
}

std::string check_polylog_derivative() {
  double worst = 0.0;
  for (int n = 0; n <= 6; ++n) {
    for (double u : {-0.5, -0.1, 0.1, 0.5, 0.9}) {
      const double h = 3e-5 * (1.0 - std::fabs(u));
      const double fd = special::polylog_neg_fd_recursion(n, u, h);
      const double closed = special::polylog_neg_closed(n + 1, u);
      worst = std::max(worst, relative_difference(fd, closed));
    }
  }
  require(worst <= 1e-5, "derivative recursion worst " + fmt(worst));
  return "u d/du Li_{-n} matches Li_{-(n+1)}, worst relative " + fmt(worst);
}

std::string check_dual_formula() {
  double worst = 0.0;
  std::string where;
  for (double theta : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    for (int n : {2, 3, 5, 10, 50, 100}) {
      for (int i = 1; i <= 8; ++i) {
        const MutationParams params{theta, n};
        const auto forms = cumulants::segsites_cumulant_forms(params, i);
        const double diff = relative_difference(forms.polylog_sum,
                                                forms.stirling_harmonic);
        if (diff > worst) {
          worst = diff;
          where = "theta = " + fmt(theta) + ", n = " + std::to_string(n) +
                  ", i = " + std::to_string(i);
        }
        cumulants::segsites_cumulant(params, i);  // integrity path
      }
    }
  }
  require(worst <= 1e-10, "dual forms worst " + fmt(worst) + " at " + where);
  return "both forms agree to 1e-10; worst relative " + fmt(worst) + " at " +
         where;
}

std::string check_additivity() {
  double worst = 0.0;
  for (double theta : {0.5, 2.0}) {
    for (int n : {5, 50}) {
      for (int i = 1; i <= 6; ++i) {
        CompensatedSum sum;
        for (int k = 2; k <= n; ++k) {
          sum.add(cumulants::geometric_Gk_cumulant(theta, k, i));
        }
        const double whole =
            cumulants::segsites_cumulant(MutationParams{theta, n}, i);
        worst = std::max(worst, relative_difference(sum.value(), whole));
      }
    }
  }
  require(worst <= 1e-12, "additivity worst " + fmt(worst));
  return "kappa_i(S_n) = sum of level cumulants, worst relative " + fmt(worst);
}

std::string check_negbin_routes() {
  double worst_series = 0.0;
  double worst_partition = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    for (double p : {0.1, 0.5, 0.9}) {
      for (int i = 1; i <= 8; ++i) {
        const cumulants::NegBinParams params{a, p};
        const double closed = cumulants::negbin_cumulant(params, i);
        const double series = cumulants::negbin_cumulant_series(params, i);
        const double partition =
            cumulants::negbin_cumulant_partition_sum(params, i);
        worst_series =
            std::max(worst_series, relative_difference(closed, series));
        worst_partition =
            std::max(worst_partition, relative_difference(closed, partition));
      }
    }
  }
  require(worst_series <= 1e-9,
          "closed vs series worst " + fmt(worst_series));
  require(worst_partition <= 1e-10,
          "closed vs partition-sum worst " + fmt(worst_partition));
  return "three routes agree; series " + fmt(worst_series) + ", partitions " +
         fmt(worst_partition);
}

std::string check_negbin_examples() {
  const cumulants::NegBinParams half{1.0, 0.5};
  require_rel(cumulants::negbin_cumulant(half, 1), 1.0, 1e-12, "kappa_1");
  require_rel(cumulants::negbin_cumulant(half, 2), 2.0, 1e-12, "kappa_2");
  require_rel(cumulants::negbin_cumulant(half, 3), 6.0, 1e-12, "kappa_3");
  for (double a : {0.5, 2.0}) {
    for (double p : {0.1, 0.9}) {
      const cumulants::NegBinParams params{a, p};
      require_rel(cumulants::negbin_cumulant(params, 1), a * p / (1.0 - p),
                  1e-12, "mean identity");
      require_rel(cumulants::negbin_cumulant(params, 2),
                  a * p / ((1.0 - p) * (1.0 - p)), 1e-12,
                  "variance identity");
    }
  }
  return "ap/(1-p) and ap/(1-p)^2 identities";
}

std::string check_mixing_rate() {
  require_rel(cumulants::negbin_mixing_rate(0.25), 3.0, 1e-15, "rate(0.25)");
  require_rel(cumulants::negbin_mixing_rate(0.5), 1.0, 1e-15, "rate(0.5)");
  // lgamma-based pmf normalizes.
  const cumulants::NegBinParams params{2.5, 0.7};
  CompensatedSum sum;
  for (std::uint64_t k = 0; k <= 400; ++k) {
    sum.add(cumulants::negbin_pmf(params, k));
  }
  require_rel(sum.value(), 1.0, 1e-9, "negbin pmf normalization");
  return "rate (1-p)/p and pmf normalization";
}

std::string check_geometric_examples() {
  require_rel(cumulants::geometric_Gk_cumulant(1.0, 2, 1), 1.0, 1e-12,
              "mean theta/(k-1)");
  require_rel(cumulants::geometric_Gk_cumulant(1.0, 2, 3), 6.0, 1e-12,
              "third cumulant at p = 1/2");
  require_rel(cumulants::geometric_Gk_cumulant(2.0, 3, 2), 2.0, 1e-12,
              "variance p/(1-p)^2 at p = 1/2");
  return "level-k geometric cumulants";
}

std::string check_segsites_examples() {
  const MutationParams small{1.0, 2};
  require_rel(cumulants::segsites_cumulant(small, 1), 1.0, 1e-12, "kappa_1");
  require_rel(cumulants::segsites_cumulant(small, 2), 2.0, 1e-12, "kappa_2");
  require_rel(cumulants::segsites_cumulant(small, 3), 6.0, 1e-12, "kappa_3");
  const MutationParams watterson{2.0, 10};
  require_rel(cumulants::segsites_mean(watterson),
              2.0 * harmonic_rational(9, 1), 1e-12, "Watterson mean");
  require_rel(cumulants::segsites_var(watterson),
              2.0 * harmonic_rational(9, 1) + 4.0 * harmonic_rational(9, 2),
              1e-12, "Watterson variance");
  return "n = 2 geometric case and Watterson's moments";
}

std::string check_watterson_identity() {
  for (double theta : {0.5, 2.0}) {
    for (int n : {2, 10, 100}) {
      const double mean = cumulants::segsites_mean(MutationParams{theta, n});
      const double est =
          mean / special::harmonic(static_cast<std::uint64_t>(n) - 1, 1);
      require_rel(est, theta, 1e-12, "estimator applied to analytic mean");
    }
  }
  require_rel(cumulants::watterson_estimator(5, 6), 300.0 / 137.0, 1e-12,
              "5/H_5");
  require(cumulants::watterson_estimator(0, 10) == 0.0, "zero sites");
  require_rel(cumulants::watterson_estimator(7, 2), 7.0, 1e-15, "H_1 = 1");
  return "unbiasedness identity and point values";
}

std::string check_pmf_examples() {
  for (double theta : {0.5, 1.0, 2.0}) {
    const MutationParams params{theta, 2};
    const double q = theta / (1.0 + theta);
    for (std::uint64_t m = 0; m <= 20; ++m) {
      const auto r = cumulants::segsites_pmf(params, m);
      require(r.precision_ok, "n = 2 must not lose precision");
      require_rel(r.value, (1.0 - q) * std::pow(q, static_cast<double>(m)),
                  1e-12, "geometric pmf at m = " + std::to_string(m));
    }
  }
  require_rel(cumulants::segsites_pmf(MutationParams{1.0, 2}, 0).value, 0.5,
              1e-15, "P{S_2 = 0} = 1/2");
  require_rel(cumulants::segsites_pmf(MutationParams{1.0, 2}, 3).value,
              1.0 / 16.0, 1e-15, "P{S_2 = 3} = 1/16");
  return "n = 2 reduces to the geometric law";
}

std::string check_pmf_normalization() {
  double worst = 0.0;
  for (int n : {2, 3, 5, 10}) {
    for (double theta : {0.5, 1.0, 2.0}) {
      const MutationParams params{theta, n};
      CompensatedSum sum;
      double cumulative = 0.0;
      std::uint64_t m = 0;
      while (cumulative < 1.0 - 1e-12 && m <= 100'000) {
        const auto r = cumulants::segsites_pmf(params, m);
        require(r.precision_ok, "precision flag at small n");
        sum.add(r.value);
        cumulative = sum.value();
        ++m;
      }
      worst = std::max(worst, std::fabs(sum.value() - 1.0));
    }
  }
  require(worst <= 1e-9, "normalization worst |sum - 1| = " + fmt(worst));
  return "truncated pmf sums to 1 within " + fmt(worst);
}

std::string check_pmf_moment_consistency() {
  double worst_mean = 0.0;
  double worst_var = 0.0;
  for (int n : {2, 5, 10}) {
    for (double theta : {0.5, 1.0, 2.0}) {
      const MutationParams params{theta, n};
      CompensatedSum s0;
      CompensatedSum s1;
      CompensatedSum s2;
      for (std::uint64_t m = 0; m <= 2000; ++m) {
        const double p = cumulants::segsites_pmf(params, m).value;
        const double md = static_cast<double>(m);
        s0.add(p);
        s1.add(md * p);
        s2.add(md * md * p);
        if (s0.value() > 1.0 - 1e-13 && p < 1e-15) break;
      }
      const double mean = cumulants::segsites_mean(params);
      const double var = cumulants::segsites_var(params);
      worst_mean = std::max(worst_mean,
                            relative_difference(s1.value(), mean));
      worst_var = std::max(
          worst_var,
          relative_difference(s2.value() - s1.value() * s1.value(), var));
    }
  }
  require(worst_mean <= 1e-6, "pmf mean worst " + fmt(worst_mean));
  require(worst_var <= 1e-5, "pmf variance worst " + fmt(worst_var));
  return "pmf mean/variance match cumulants (" + fmt(worst_mean) + ", " +
         fmt(worst_var) + ")";
}

std::string check_pgf_identities() {
  require(cumulants::segsites_pgf(MutationParams{3.7, 23}, 1.0) == 1.0,
          "pgf(1) = 1 exactly");
  require_rel(cumulants::segsites_pgf(MutationParams{1.0, 2}, 0.0), 0.5,
              1e-15, "pgf(0) at n = 2");
  require_rel(cumulants::segsites_pgf(MutationParams{1.0, 3}, 0.0),
              1.0 / 3.0, 1e-15, "pgf(0) at n = 3");
  bool threw = false;
  try {
    cumulants::segsites_pgf(MutationParams{1.0, 5}, 3.0);
  } catch (const std::domain_error&) {
    threw = true;
  }
  require(threw, "domain error when a denominator vanishes");
  return "pgf point values and the n = 2, 3 checks";
}

std::string check_pgf_pmf_consistency() {
  double worst = 0.0;
  for (int n : {2, 5, 10}) {
    for (double theta : {0.5, 2.0}) {
      const MutationParams params{theta, n};
      for (double s : {0.0, 0.3, 0.7}) {
        CompensatedSum sum;
        double spow = 1.0;
        for (std::uint64_t m = 0; m <= 4000; ++m) {
          const double term =
              cumulants::segsites_pmf(params, m).value * spow;
          sum.add(term);
          spow *= s;
          if (m > 10 && std::fabs(term) < 1e-16) break;
        }
        worst = std::max(
            worst, std::fabs(sum.value() - cumulants::segsites_pgf(params, s)));
      }
    }
  }
  require(worst <= 1e-8, "sum pmf s^m vs pgf worst " + fmt(worst));
  return "series evaluation of the pgf agrees, worst " + fmt(worst);
}

std::string check_moments_from_cumulants() {
  // Poisson(1): raw moments are the Bell numbers.
  cumulants::CumulantVector poisson;
  poisson.values = {1.0, 1.0, 1.0, 1.0};
  const auto mu = cumulants::moments_from_cumulants(poisson);
  require_rel(mu.values[0], 1.0, 1e-15, "Poisson mu'_1");
  require_rel(mu.values[1], 2.0, 1e-15, "Poisson mu'_2");
  require_rel(mu.values[2], 5.0, 1e-15, "Poisson mu'_3");
  require_rel(mu.values[3], 15.0, 1e-15, "Poisson mu'_4");
  cumulants::CumulantVector normal;
  normal.values = {0.0, 1.0, 0.0, 0.0};
  require_rel(cumulants::moments_from_cumulants(normal).values[3], 3.0, 1e-15,
              "Gaussian mu'_4 = 3");
  cumulants::CumulantVector first;
  first.values = {4.25};
  require(cumulants::moments_from_cumulants(first).values[0] == 4.25,
          "mu'_1 = kappa_1");
  return "Bell-number and Gaussian fixed points";
}

std::string check_lln_ratio() {
  const auto rows = asymptotics::lln_table(1.0, {2, 1 << 20});
  require_rel(rows.front().sigma2, 2.0, 1e-12, "Var(S_2/E S_2) = 2");
  const double ratio = rows.back().ratio;
  require(std::fabs(ratio - 1.0) <= 0.2,
          "sigma^2 theta log n = " + fmt(ratio) + " at n = 2^20");
  return "sigma^2 theta log n = " + fmt(ratio) + " at n = 2^20";
}

std::string check_clt_columns() {
  std::vector<int> grid;
  for (int j = 4; j <= 20; ++j) grid.push_back(1 << j);
  const auto rows = asymptotics::clt_table(1.0, grid, 4);
  for (std::size_t col = 0; col < 2; ++col) {
    for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
      require(rows[r].normalized[col] > 0.0, "normalized cumulants positive");
      require(rows[r].normalized[col] > rows[r + 1].normalized[col],
              "order-" + std::to_string(col + 3) +
                  " column not strictly decreasing at n = " +
                  std::to_string(rows[r + 1].n));
    }
  }
  return "normalized kappa_3, kappa_4 strictly decreasing on 2^4..2^20";
}

std::string check_harmonic_log_asymptote() {
  double prev = 1e300;
  double last = 0.0;
  for (int j = 4; j <= 20; ++j) {
    const std::uint64_t n = 1ull << j;
    const double gap = std::fabs(
        special::harmonic(n, 1) / std::log(static_cast<double>(n)) - 1.0);
    require(gap < prev, "|H_n/log n - 1| not decreasing at n = 2^" +
                            std::to_string(j));
    prev = gap;
    last = gap;
  }
  require(last < 0.1, "|H_n/log n - 1| = " + fmt(last) + " at n = 2^20");
  return "H_n/log n -> 1, gap " + fmt(last) + " at n = 2^20";
}

std::string check_rng_known_answers() {
  using rng::Block;
  using rng::Key;
  const std::uint64_t ff = ~0ull;
  struct Vector {
    Block counter;
    Key key;
    Block expect;
  };
  // First two are the reference Philox4x64-10 known-answer vectors; the
  // third pins an arbitrary mixed input.
  const Vector vectors[] = {
      {{0, 0, 0, 0},
       {0, 0},
       {0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull, 0xd7e772cee186176bull,
        0x7e68b68aec7ba23bull}},
      {{ff, ff, ff, ff},
       {ff, ff},
       {0x87b092c3013fe90bull, 0x438c3c67be8d0224ull, 0x9cc7d7c69cd777b6ull,
        0xa09caebf594f0ba0ull}},
      {{0x0123456789abcdf0ull, 0xfedcba9876543210ull, 0xdeadbeefcafebabeull,
        0x0f1e2d3c4b5a6978ull},
       {0x243f6a8885a308d3ull, 0x13198a2e03707344ull},
       {0x26719e0828603219ull, 0x99fcc82ffcc50a9bull, 0x62244320b19441e1ull,
        0x8b24ce62f448e823ull}},
  };
  for (const auto& v : vectors) {
    require(rng::philox4x64(v.counter, v.key) == v.expect,
            "Philox4x64-10 known-answer vector mismatch");
  }
  // Lane layout of fill_unit_lane against direct block evaluation.
  const Key key{99, 7};
  double out[8];
  rng::fill_unit_lane(key, 5, 2, 4, 8, out);
  const Block b1 = rng::philox4x64({1, 5, 0, 2}, key);
  const Block b2 = rng::philox4x64({2, 5, 0, 2}, key);
  for (int i = 0; i < 4; ++i) {
    require(out[i] == rng::to_unit(b1[static_cast<std::size_t>(i)]) &&
                out[i + 4] == rng::to_unit(b2[static_cast<std::size_t>(i)]),
            "fill_unit_lane layout mismatch");
  }
  for (double u : out) {
    require(u > 0.0 && u < 1.0, "to_unit must stay inside (0, 1)");
  }
  return "Philox vectors, lane layout, and (0,1) mapping";
}

std::string check_kernel_equivalence() {
  namespace k = kernels;
  if (!k::isa_supported(k::Isa::avx2)) {
    return "AVX2 unavailable; scalar build is the only candidate";
  }
  const std::size_t n = 4096;
  std::vector<double> u(n);
  rng::fill_unit_lane({314159, 1}, 0, 0, 0, n, u.data());

  const k::Isa saved = k::active_isa();
  struct Restore {
    k::Isa isa;
    ~Restore() { k::force_isa(isa); }
  } restore{saved};

  std::vector<double> log_s(n), log_v(n), geo_s(n, 0.0), geo_v(n, 0.0),
      exp_s(n, 1.5), exp_v(n, 1.5);
  k::force_isa(k::Isa::scalar);
  k::log_unit(u.data(), log_s.data(), n);
  k::geometric_accumulate(u.data(), 1.0 / std::log(0.6), geo_s.data(), n);
  k::exp_accumulate(u.data(), 0.7, exp_s.data(), n);
  const auto cs_s = k::central_sums(u.data(), n, 0.5);
  k::force_isa(k::Isa::avx2);
  k::log_unit(u.data(), log_v.data(), n);
  k::geometric_accumulate(u.data(), 1.0 / std::log(0.6), geo_v.data(), n);
  k::exp_accumulate(u.data(), 0.7, exp_v.data(), n);
  const auto cs_v = k::central_sums(u.data(), n, 0.5);

  require(log_s == log_v, "log_unit differs between ISAs");
  require(geo_s == geo_v, "geometric_accumulate differs between ISAs");
  require(exp_s == exp_v, "exp_accumulate differs between ISAs");
  require(cs_s.d1 == cs_v.d1 && cs_s.d2 == cs_v.d2 && cs_s.d3 == cs_v.d3 &&
              cs_s.d4 == cs_v.d4,
          "central_sums differs between ISAs");

  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, relative_difference(log_s[i], std::log(u[i])));
  }
  require(worst <= 1e-14, "kernel log vs libm worst " + fmt(worst));
  return "scalar and AVX2 builds bit-identical; log within " + fmt(worst) +
         " of libm";
}

// ---------------------------------------------------------------------------
// Full checks (Monte Carlo, R up to 10^6)

std::string check_mc_moments_mean_var() {
  double worst = 0.0;
  std::string where;
  for (int mi = 0; mi < 3; ++mi) {
    for (int ni = 0; ni < 4; ++ni) {
      for (int ti = 0; ti < 3; ++ti) {
        const MutationParams params{kGridTheta[ti], kGridN[ni]};
        const auto& s = grid_summary(ni, ti, mi);
        const double z1 =
            std::fabs(s.mean - cumulants::segsites_mean(params)) / s.se_mean;
        const double z2 =
            std::fabs(s.variance - cumulants::segsites_var(params)) / s.se_k2;
        const double z = std::max(z1, z2);
        if (z > worst) {
          worst = z;
          where = std::string(sim::method_name(static_cast<sim::Method>(mi))) +
                  ", n = " + std::to_string(kGridN[ni]) +
                  ", theta = " + fmt(kGridTheta[ti]);
        }
      }
    }
  }
  require(worst <= 5.0, "mean/variance worst |z| = " + fmt(worst) + " (" +
                            where + ")");
  return "36 cells within 5 SE; worst |z| = " + fmt(worst) + " (" + where +
         ")";
}

std::string check_mc_moments_k3_k4() {
  double worst = 0.0;
  std::string where;
  for (int mi = 0; mi < 3; ++mi) {
    for (int ni = 0; ni < 4; ++ni) {
      for (int ti = 0; ti < 3; ++ti) {
        const MutationParams params{kGridTheta[ti], kGridN[ni]};
        const auto& s = grid_summary(ni, ti, mi);
        const double z3 =
            std::fabs(s.k3 - cumulants::segsites_cumulant(params, 3)) /
            s.se_k3;
        const double z4 =
            std::fabs(s.k4 - cumulants::segsites_cumulant(params, 4)) /
            s.se_k4;
        const double z = std::max(z3, z4);
        if (z > worst) {
          worst = z;
          where = std::string(sim::method_name(static_cast<sim::Method>(mi))) +
                  ", n = " + std::to_string(kGridN[ni]) +
                  ", theta = " + fmt(kGridTheta[ti]);
        }
      }
    }
  }
  require(worst <= 5.0,
          "k3/k4 worst |z| = " + fmt(worst) + " (" + where + ")");
  return "36 cells within 5 SE; worst |z| = " + fmt(worst) + " (" + where +
         ")";
}

std::string check_mc_pmf_total_variation() {
  double worst = 0.0;
  for (int n : {2, 3, 5}) {
    const MutationParams params{1.0, n};
    const sim::SimConfig config{params, 1'000'000,
                                fixtures::kMcSeed + static_cast<std::uint64_t>(n),
                                sim::Method::GeometricSum};
    const auto batch = sim::simulate(config);
    const double tv = total_variation(
        batch.counts,
        [&](std::uint64_t m) { return cumulants::segsites_pmf(params, m).value; },
        1e-9);
    worst = std::max(worst, tv);
  }
  require(worst <= 0.005, "total variation worst " + fmt(worst));
  return "empirical vs analytic pmf, worst TV = " + fmt(worst);
}

std::string check_mc_clt_distance() {
  const auto& report = clt_report();
  require(report.ks_distance <= fixtures::kCltKsBudget,
          "KS distance " + fmt(report.ks_distance) + " exceeds budget " +
              fmt(fixtures::kCltKsBudget));
  return "KS distance " + fmt(report.ks_distance) + " within budget " +
         fmt(fixtures::kCltKsBudget);
}

std::string check_mc_clt_shape() {
  const auto& report = clt_report();
  const double skew_err =
      std::fabs(report.skewness - report.analytic_skewness);
  const double kurt_err =
      std::fabs(report.excess_kurtosis - report.analytic_excess_kurtosis);
  require(skew_err <= 0.02, "skewness off by " + fmt(skew_err));
  require(kurt_err <= 0.05, "excess kurtosis off by " + fmt(kurt_err));
  return "sample skewness/kurtosis match analytic (" + fmt(skew_err) + ", " +
         fmt(kurt_err) + ")";
}

std::string check_mc_cross_method() {
  for (const auto& [n, theta] : {std::pair<int, double>{2, 1.0},
                                 std::pair<int, double>{50, 0.5}}) {
    const auto report = sim::cross_method_check(MutationParams{theta, n},
                                                100'000, fixtures::kMcSeed);
    require(!report.declined, "comparison unexpectedly declined");
    for (const auto& cmp : report.comparisons) {
      require(!cmp.flagged,
              std::string("|z| > 4 between ") + sim::method_name(cmp.a) +
                  " and " + sim::method_name(cmp.b) + " at n = " +
                  std::to_string(n));
    }
  }
  return "all pairwise z-scores below 4 at (2, 1) and (50, 0.5)";
}

std::string check_mc_chi_square() {
  const MutationParams params{1.0, 10};
  const sim::SimConfig ga{params, 100'000, fixtures::kMcSeed,
                          sim::Method::GeometricSum};
  const sim::SimConfig gb{params, 100'000, fixtures::kMcSeed,
                          sim::Method::ExponentialMixture};
  const double p = two_sample_chi_square_p(sim::simulate(ga).counts,
                                           sim::simulate(gb).counts);
  require(p >= fixtures::kChiSquareMinP,
          "chi-square p = " + fmt(p) + " below " +
              fmt(fixtures::kChiSquareMinP));
  return "GeometricSum vs ExponentialMixture chi-square p = " + fmt(p);
}

std::string check_mc_mixture_vs_negbin() {
  double worst = 0.0;
  for (const auto& [a, p] : {std::pair<double, double>{1.0, 0.5},
                             std::pair<double, double>{2.0, 0.25},
                             std::pair<double, double>{0.5, 0.5}}) {
    const auto batch = sim::gamma_poisson_batch(
        a, cumulants::negbin_mixing_rate(p), 200'000, fixtures::kMcSeed);
    const cumulants::NegBinParams params{a, p};
    const double tv = total_variation(
        batch,
        [&](std::uint64_t k) { return cumulants::negbin_pmf(params, k); },
        1e-9);
    worst = std::max(worst, tv);
  }
  require(worst <= 0.01, "mixture vs NB pmf worst TV = " + fmt(worst));
  // The swapped convention beta = p/(1-p) must NOT fit: at p = 1/4 the
  // mixing rate would be 1/3 instead of 3.
  const auto wrong = sim::gamma_poisson_batch(2.0, 0.25 / 0.75, 200'000,
                                              fixtures::kMcSeed);
  const cumulants::NegBinParams params{2.0, 0.25};
  const double tv_wrong = total_variation(
      wrong, [&](std::uint64_t k) { return cumulants::negbin_pmf(params, k); },
      1e-9);
  require(tv_wrong > 0.1,
          "swapped mixing rate unexpectedly close, TV = " + fmt(tv_wrong));
  return "rate (1-p)/p fits (worst TV " + fmt(worst) +
         "); swapped rate misfits (TV " + fmt(tv_wrong) + ")";
}

std::string check_mc_poisson_sampler() {
  const auto small = sim::summarize_counts(
      sim::poisson_batch(4.0, 1'000'000, fixtures::kMcSeed));
  for (const auto& [value, se, label] :
       {std::tuple<double, double, const char*>{small.variance, small.se_k2,
                                                "k2"},
        std::tuple<double, double, const char*>{small.k3, small.se_k3, "k3"},
        std::tuple<double, double, const char*>{small.k4, small.se_k4,
                                                "k4"}}) {
    require(std::fabs(value - 4.0) <= 5.0 * se,
            std::string(label) + " = " + fmt(value) +
                " not within 5 SE of 4");
  }
  // Large rate exercises the PTRS branch.
  const auto big = sim::summarize_counts(
      sim::poisson_batch(30.0, 200'000, fixtures::kMcSeed));
  require(std::fabs(big.mean - 30.0) <= 5.0 * big.se_mean,
          "PTRS mean " + fmt(big.mean));
  require(std::fabs(big.variance - 30.0) <= 5.0 * big.se_k2,
          "PTRS variance " + fmt(big.variance));
  require(std::fabs(big.k3 - 30.0) <= 5.0 * big.se_k3,
          "PTRS k3 " + fmt(big.k3));
  return "Poisson sampler cumulants at rates 4 (Knuth) and 30 (PTRS)";
}

struct Check {
  const char* name;
  std::string (*fn)();
};

constexpr Check kFastChecks[] = {
    {"stirling-recurrence", check_stirling_recurrence},
    {"stirling-partition-counts", check_stirling_partition_counts},
    {"stirling-examples", check_stirling_examples},
    {"harmonic-values", check_harmonic_values},
    {"zeta-values", check_zeta_values},
    {"polylog-closed-vs-series", check_polylog_closed_vs_series},
    {"polylog-derivative-recursion", check_polylog_derivative},
    {"dual-formula-identity", check_dual_formula},
    {"cumulant-additivity", check_additivity},
    {"negbin-three-routes", check_negbin_routes},
    {"negbin-examples", check_negbin_examples},
    {"mixing-rate-closed-form", check_mixing_rate},
    {"geometric-level-examples", check_geometric_examples},
    {"segsites-examples", check_segsites_examples},
    {"watterson-identity", check_watterson_identity},
    {"pmf-examples", check_pmf_examples},
    {"pmf-normalization", check_pmf_normalization},
    {"pmf-moment-consistency", check_pmf_moment_consistency},
    {"pgf-identities", check_pgf_identities},
    {"pgf-pmf-consistency", check_pgf_pmf_consistency},
    {"moments-from-cumulants", check_moments_from_cumulants},
    {"lln-ratio", check_lln_ratio},
    {"clt-columns-decreasing", check_clt_columns},
    {"harmonic-log-asymptote", check_harmonic_log_asymptote},
    {"rng-known-answers", check_rng_known_answers},
    {"kernel-isa-equivalence", check_kernel_equivalence},
};

constexpr Check kFullChecks[] = {
    {"mc-moments-mean-var", check_mc_moments_mean_var},
    {"mc-moments-k3-k4", check_mc_moments_k3_k4},
    {"mc-pmf-total-variation", check_mc_pmf_total_variation},
    {"mc-clt-distance", check_mc_clt_distance},
    {"mc-clt-shape", check_mc_clt_shape},
    {"mc-cross-method", check_mc_cross_method},
    {"mc-chi-square-methods", check_mc_chi_square},
    {"mc-mixture-vs-negbin", check_mc_mixture_vs_negbin},
    {"mc-poisson-sampler", check_mc_poisson_sampler},
};

}  // namespace

std::vector<CheckResult> run_checks(
    Level level, const std::function<void(const CheckResult&)>& on_result,
    const std::vector<std::string>& only) {
  std::vector<Check> selected(std::begin(kFastChecks), std::end(kFastChecks));
  if (level == Level::full) {
    selected.insert(selected.end(), std::begin(kFullChecks),
                    std::end(kFullChecks));
  }
  if (!only.empty()) {
    std::vector<Check> filtered;
    for (const auto& name : only) {
      const auto it = std::find_if(
          selected.begin(), selected.end(),
          [&](const Check& c) { return name == c.name; });
      if (it == selected.end()) {
        throw std::invalid_argument("unknown check '" + name + "'");
      }
      filtered.push_back(*it);
    }
    selected = std::move(filtered);
  }
  std::vector<CheckResult> results;
  results.reserve(selected.size());
  for (const auto& check : selected) {
    CheckResult result;
    result.name = check.name;
    try {
      result.detail = check.fn();
      result.passed = true;
    } catch (const std::exception& e) {
      result.passed = false;
      result.detail = e.what();
    }
    if (on_result) on_result(result);
    results.push_back(std::move(result));
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

}  // namespace segsites::verify
