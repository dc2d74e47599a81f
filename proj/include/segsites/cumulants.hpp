#pragma once

#include <cstdint>
#include <vector>

#include "segsites/params.hpp"

namespace segsites::cumulants {

// Shape a and success parameter p of a negative binomial: P{N = k} =
// binom(a + k - 1, k) p^k (1 - p)^a on non-negative integers.
struct NegBinParams {
  double a = 1.0;
  double p = 0.5;

  // Throws std::invalid_argument unless a > 0 and 0 <= p < 1.
  void validate() const;
};

// values[j - 1] holds kappa_j (respectively the raw moment mu'_j).
struct CumulantVector {
  std::vector<double> values;
  int max_order() const { return static_cast<int>(values.size()); }
};

struct MomentVector {
  std::vector<double> values;
  int max_order() const { return static_cast<int>(values.size()); }
};

// kappa_j of Poisson(lambda): lambda for every j >= 1.
double poisson_cumulant(double lambda, int j);

// kappa_j of Gamma(shape alpha, rate beta): alpha (j-1)! / beta^j.
double gamma_cumulant(double alpha, double beta, int j);

// kappa_i of NB(a, p) by the closed form a Li_{1-i}(p) (Stirling route).
double negbin_cumulant(const NegBinParams& params, int i);

// Same cumulant with the polylogarithm evaluated by its defining series
// (generating-function truncation route, Stirling-free).
double negbin_cumulant_series(const NegBinParams& params, int i);

// Same cumulant by the law of total cumulance: N | Lambda ~ Poisson(Lambda)
// with Lambda ~ Gamma(a, rate (1-p)/p), so kappa_i(N) is the sum of
// kappa_{|pi|}(Lambda) over all set partitions pi of {1..i}. Enumerates the
// partitions; i <= 12 or capacity_error.
double negbin_cumulant_partition_sum(const NegBinParams& params, int i);

// The Gamma mixing rate that reproduces the NB(a, p) pmf: (1 - p)/p.
// (Deriving the rate from p = b/(1+b) instead gives p/(1-p) and a mixture
// whose pmf does not match; the pmf is the contract. The verification suite
// re-checks this by simulating the mixture.)
double negbin_mixing_rate(double p);

// P{N = k} for N ~ NB(a, p), via lgamma.
double negbin_pmf(const NegBinParams& params, std::uint64_t k);

// kappa_i of the level-k coalescent contribution G_k (number of mutations
// while k lineages are active, k >= 2): geometric on non-negative integers
// with failure probability theta/(k - 1 + theta), i.e. NB(1, p) at
// p = theta/(k - 1 + theta).
double geometric_Gk_cumulant(double theta, int k, int i);

// Both closed forms of kappa_i(S_n) side by side:
//   polylog_sum:       sum_{k=1..n-1} Li_{1-i}(theta/(k + theta))
//   stirling_harmonic: sum_{b=1..i} {i, b} (b-1)! theta^b H_{n-1}^(b)
struct SegsitesCumulantForms {
  double polylog_sum = 0.0;
  double stirling_harmonic = 0.0;
};

SegsitesCumulantForms segsites_cumulant_forms(const MutationParams& params,
                                              int i);

// kappa_i(S_n). Computes both forms, requires relative agreement within
// 1e-10 (throws integrity_error otherwise: a library bug, not bad input),
// and returns the Stirling/harmonic form, whose terms are all positive.
double segsites_cumulant(const MutationParams& params, int i);

// Orders 1..max_order in one call.
CumulantVector segsites_cumulants(const MutationParams& params, int max_order);

// Specializations: theta H_{n-1} and theta H_{n-1} + theta^2 H_{n-1}^(2).
double segsites_mean(const MutationParams& params);
double segsites_var(const MutationParams& params);

// P{S_n = m} by the alternating sum
//   ((n-1)/theta) sum_{k=1..n-1} (-1)^{k-1} binom(n-2, k-1)
//                                (theta/(k + theta))^{m+1}.
// The sum cancels catastrophically for large n; `cancellation` records
// (largest intermediate term)/|result| and precision_ok is false once it
// exceeds kPmfCancellationLimit, signalling loss of precision rather than
// silently returning noise.
inline constexpr double kPmfCancellationLimit = 1e12;

struct PmfResult {
  double value = 0.0;
  double cancellation = 0.0;
  bool precision_ok = true;
};

PmfResult segsites_pmf(const MutationParams& params, std::uint64_t m);

// Upper bound on the exact tail P(S_n > m). Summing the alternating pmf
// representation over the tail gives
//   P(S_n > m) = ((n-1)/theta) sum_k (-1)^{k-1} C(n-2,k-1) u_k^{m+2}/(1-u_k)
// with u_k = theta/(k+theta), so the all-positive version bounds it.
// Evaluated in log space, hence finite for any n; monotone nonincreasing in
// m, geometrically decaying at rate theta/(1+theta), exactly the true tail
// at n = 2, and immune to the cancellation that limits segsites_pmf (at the
// price of being loose, possibly above 1, below the bulk of the mass).
double segsites_pmf_tail_bound(const MutationParams& params, std::uint64_t m);

// E s^{S_n} = prod_{k=1..n-1} k/(k + theta(1 - s)). Throws
// std::domain_error if any factor denominator is <= 0.
double segsites_pgf(const MutationParams& params, double s);

// Raw moments from cumulants by the recurrence
//   mu'_j = sum_{l=0..j-1} binom(j-1, l) kappa_{l+1} mu'_{j-1-l}.
// max_order <= 12 or capacity_error.
MomentVector moments_from_cumulants(const CumulantVector& kappa);

// Watterson's estimator s_observed / H_{n-1}.
double watterson_estimator(std::uint64_t s_observed, int n);

}  // namespace segsites::cumulants
