#include "segsites/cumulants.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "segsites/errors.hpp"
#include "segsites/numeric.hpp"
#include "segsites/special_functions.hpp"

namespace segsites::cumulants {

namespace {

constexpr double kDualFormTolerance = 1e-10;
constexpr int kPartitionOrderCap = 12;

void check_order(int i) {
  if (i < 1) {
    throw std::invalid_argument("cumulant order must be >= 1, got " +
                                std::to_string(i));
  }
}

// Eulerian numbers <j, k> for rows j = 0..kMaxStirlingN, built from the
// additive recurrence <j,k> = (k+1)<j-1,k> + (j-k)<j-1,k-1>. Entries are
// exact in double through j = 18 and accurate to a few ulps beyond, far
// inside the dual-form tolerance.
const std::vector<std::vector<double>>& eulerian_rows() {
  static const std::vector<std::vector<double>> rows = [] {
    std::vector<std::vector<double>> r(special::kMaxStirlingN + 1);
    r[0] = {1.0};
    for (int j = 1; j <= special::kMaxStirlingN; ++j) {
      const auto& prev = r[static_cast<std::size_t>(j - 1)];
      const int prev_len = static_cast<int>(prev.size());
      auto& row = r[static_cast<std::size_t>(j)];
      row.assign(static_cast<std::size_t>(j), 0.0);
      for (int k = 0; k < j; ++k) {
        const double above =
            k < prev_len ? prev[static_cast<std::size_t>(k)] : 0.0;
        const double left =
            k > 0 && k - 1 < prev_len ? prev[static_cast<std::size_t>(k - 1)]
                                      : 0.0;
        row[static_cast<std::size_t>(k)] = (k + 1) * above + (j - k) * left;
      }
    }
    return r;
  }();
  return rows;
}

// Li_{-j}(u) through the Eulerian representation
//   Li_{-j}(u) = (1-u)^{-(j+1)} Sum_{k=0..j-1} <j,k> u^{k+1},  j >= 1,
// with Li_0(u) = u/(1-u). This route shares no tables with the Stirling
// closed form, so the dual-form consistency check compares two genuinely
// independent computations. Taking 1-u explicitly lets the caller supply it
// without cancellation (here 1-u = k/(k+theta) exactly by construction).
double polylog_neg_eulerian(int j, double u, double one_minus_u) {
  if (j == 0) return u / one_minus_u;
  const auto& row = eulerian_rows()[static_cast<std::size_t>(j)];
  CompensatedSum sum;
  double u_pow = u;
  for (int k = 0; k < j; ++k) {
    sum.add(row[static_cast<std::size_t>(k)] * u_pow);
    u_pow *= u;
  }
  return sum.value() * std::pow(one_minus_u, -static_cast<double>(j + 1));
}

}  // namespace

void NegBinParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("negative binomial shape a must be positive");
  }
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("negative binomial p must lie in [0, 1)");
  }
}

double poisson_cumulant(double lambda, int j) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Poisson rate must be positive");
  }
  check_order(j);
  return lambda;
}

double gamma_cumulant(double alpha, double beta, int j) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("Gamma shape and rate must be positive");
  }
  check_order(j);
  double r = alpha;
  for (int l = 1; l < j; ++l) r *= l;
  for (int l = 0; l < j; ++l) r /= beta;
  return r;
}

double negbin_cumulant(const NegBinParams& params, int i) {
  params.validate();
  check_order(i);
  return params.a * special::polylog_neg_closed(i - 1, params.p);
}

double negbin_cumulant_series(const NegBinParams& params, int i) {
  params.validate();
  check_order(i);
  return params.a * special::polylog_neg_series(i - 1, params.p);
}

double negbin_cumulant_partition_sum(const NegBinParams& params, int i) {
  params.validate();
  check_order(i);
  if (i > kPartitionOrderCap) {
    throw capacity_error("partition-sum route capped at order " +
                         std::to_string(kPartitionOrderCap) + ", requested " +
                         std::to_string(i));
  }
  if (params.p == 0.0) return 0.0;  // point mass at zero
  const double rate = negbin_mixing_rate(params.p);
  // Conditionally on Lambda every cumulant of Poisson(Lambda) is Lambda, so
  // the law of total cumulance reduces to one Gamma cumulant per partition,
  // keyed by its block count.
  std::vector<double> mixing(static_cast<std::size_t>(i) + 1, 0.0);
  for (int b = 1; b <= i; ++b) {
    mixing[static_cast<std::size_t>(b)] = gamma_cumulant(params.a, rate, b);
  }
  CompensatedSum sum;
  special::for_each_set_partition(i, [&](const special::SetPartition& pi) {
    sum.add(mixing[pi.size()]);
  });
  return sum.value();
}

double negbin_mixing_rate(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("mixing rate defined for p in (0, 1)");
  }
  return (1.0 - p) / p;
}

double negbin_pmf(const NegBinParams& params, std::uint64_t k) {
  params.validate();
  const double kd = static_cast<double>(k);
  if (params.p == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(std::lgamma(params.a + kd) - std::lgamma(kd + 1.0) -
                  std::lgamma(params.a) + kd * std::log(params.p) +
                  params.a * std::log1p(-params.p));
}

double geometric_Gk_cumulant(double theta, int k, int i) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("theta must be positive");
  }
  if (k < 2) {
    throw std::invalid_argument("coalescent level k must be >= 2, got " +
                                std::to_string(k));
  }
  check_order(i);
  const double u = theta / (static_cast<double>(k) - 1.0 + theta);
  return special::polylog_neg_closed(i - 1, u);
}

SegsitesCumulantForms segsites_cumulant_forms(const MutationParams& params,
                                              int i) {
  params.validate();
  check_order(i);
  SegsitesCumulantForms forms;

  // Stirling/harmonic route first; it also enforces the table capacity cap.
  CompensatedSum stirling;
  double factor = 1.0;  // (b-1)! theta^b, updated incrementally
  for (int b = 1; b <= i; ++b) {
    factor *= (b == 1) ? params.theta : (b - 1) * params.theta;
    stirling.add(special::stirling2_d(i, b) * factor *
                 special::harmonic(static_cast<std::uint64_t>(params.n) - 1, b));
  }
  forms.stirling_harmonic = stirling.value();

  // Level-by-level polylog route via the independent Eulerian evaluation.
  CompensatedSum levels;
  for (int k = 1; k <= params.n - 1; ++k) {
    const double kd = static_cast<double>(k);
    const double u = params.theta / (kd + params.theta);
    const double one_minus_u = kd / (kd + params.theta);
    levels.add(polylog_neg_eulerian(i - 1, u, one_minus_u));
  }
  forms.polylog_sum = levels.value();
  return forms;
}

double segsites_cumulant(const MutationParams& params, int i) {
  const SegsitesCumulantForms forms = segsites_cumulant_forms(params, i);
  const double diff =
      relative_difference(forms.polylog_sum, forms.stirling_harmonic);
  if (diff > kDualFormTolerance) {
    throw integrity_error(
        "segsites cumulant forms disagree: polylog sum " +
        std::to_string(forms.polylog_sum) + " vs Stirling/harmonic " +
        std::to_string(forms.stirling_harmonic) + " (relative " +
        std::to_string(diff) + ") at n = " + std::to_string(params.n) +
        ", theta = " + std::to_string(params.theta) +
        ", order = " + std::to_string(i));
  }
  return forms.stirling_harmonic;
}

CumulantVector segsites_cumulants(const MutationParams& params,
                                  int max_order) {
  check_order(max_order);
  CumulantVector kappa;
  kappa.values.reserve(static_cast<std::size_t>(max_order));
  for (int i = 1; i <= max_order; ++i) {
    kappa.values.push_back(segsites_cumulant(params, i));
  }
  return kappa;
}

double segsites_mean(const MutationParams& params) {
  return segsites_cumulant(params, 1);
}

double segsites_var(const MutationParams& params) {
  return segsites_cumulant(params, 2);
}

PmfResult segsites_pmf(const MutationParams& params, std::uint64_t m) {
  params.validate();
  CompensatedSum sum;
  double largest = 0.0;
  const double md = static_cast<double>(m);
  for (int k = 1; k <= params.n - 1; ++k) {
    const double u = params.theta / (static_cast<double>(k) + params.theta);
    const double magnitude =
        special::binomial_d(params.n - 2, k - 1) * std::pow(u, md + 1.0);
    largest = std::max(largest, magnitude);
    sum.add((k % 2 == 1) ? magnitude : -magnitude);
  }
  PmfResult r;
  r.value = (static_cast<double>(params.n) - 1.0) / params.theta * sum.value();
  r.cancellation =
      r.value == 0.0 ? (largest == 0.0 ? 0.0 : HUGE_VAL)
                     : largest / std::fabs(sum.value());
  r.precision_ok = r.cancellation <= kPmfCancellationLimit;
  return r;
}

double segsites_pmf_tail_bound(const MutationParams& params, std::uint64_t m) {
  params.validate();
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(params.n);
  // log of ((n-1)/theta) C(n-2,k-1) u_k^{m+2} / (1-u_k), accumulated by
  // log-sum-exp so enormous binomials and tiny powers never overflow.
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(params.n - 1));
  double max_log = -HUGE_VAL;
  for (int k = 1; k <= params.n - 1; ++k) {
    const double kd = static_cast<double>(k);
    const double log_u = std::log(params.theta) - std::log(kd + params.theta);
    const double log_one_minus_u = std::log(kd) - std::log(kd + params.theta);
    const double log_binom =
        std::lgamma(nd - 1.0) - std::lgamma(kd) - std::lgamma(nd - kd);
    const double l = log_binom + (md + 2.0) * log_u - log_one_minus_u;
    logs.push_back(l);
    max_log = std::max(max_log, l);
  }
  CompensatedSum shifted;
  for (const double l : logs) shifted.add(std::exp(l - max_log));
  return std::exp(std::log(nd - 1.0) - std::log(params.theta) + max_log +
                  std::log(shifted.value()));
}

double segsites_pgf(const MutationParams& params, double s) {
  params.validate();
  double product = 1.0;
  for (int k = 1; k <= params.n - 1; ++k) {
    const double kd = static_cast<double>(k);
    const double denom = kd + params.theta * (1.0 - s);
    if (!(denom > 0.0)) {
      throw std::domain_error("pgf factor denominator k + theta(1-s) <= 0 at k = " +
                              std::to_string(k));
    }
    product *= kd / denom;
  }
  return product;
}

MomentVector moments_from_cumulants(const CumulantVector& kappa) {
  const int order = kappa.max_order();
  check_order(order);
  if (order > kPartitionOrderCap) {
    throw capacity_error("moments_from_cumulants capped at order " +
                         std::to_string(kPartitionOrderCap));
  }
  MomentVector mu;
  mu.values.resize(static_cast<std::size_t>(order), 0.0);
  std::vector<double> raw(static_cast<std::size_t>(order) + 1, 0.0);
  raw[0] = 1.0;  // mu'_0
  for (int j = 1; j <= order; ++j) {
    CompensatedSum sum;
    for (int l = 0; l <= j - 1; ++l) {
      sum.add(special::binomial_d(j - 1, l) *
              kappa.values[static_cast<std::size_t>(l)] *
              raw[static_cast<std::size_t>(j - 1 - l)]);
    }
    raw[static_cast<std::size_t>(j)] = sum.value();
    mu.values[static_cast<std::size_t>(j) - 1] = sum.value();
  }
  return mu;
}

double watterson_estimator(std::uint64_t s_observed, int n) {
  if (n < 2) {
    throw std::invalid_argument("Watterson estimator requires n >= 2");
  }
  return static_cast<double>(s_observed) /
         special::harmonic(static_cast<std::uint64_t>(n) - 1, 1);
}

}  // namespace segsites::cumulants
