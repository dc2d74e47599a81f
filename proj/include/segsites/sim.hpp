#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "segsites/params.hpp"

namespace segsites::sim {

// Three mechanisms with the same distribution for S_n:
//   GeometricSum        S = sum_{k=2..n} Geom(success (k-1)/(k-1+theta))
//   ExponentialMixture  per level k: tau_k ~ Exp(rate k(k-1)/2), then
//                       G_k ~ Poisson(theta k tau_k / 2); S = sum G_k
//   FullTree            S ~ Poisson(theta/2 * L) given the total tree length
//                       L = sum_{k=2..n} k tau_k. Under infinite sites every
//                       mutation on a Kingman tree segregates in the sample,
//                       so the leaf-labeled topology never affects S_n and
//                       is deliberately not constructed.
enum class Method { GeometricSum, ExponentialMixture, FullTree };

const char* method_name(Method m);

// Accepts the canonical names above plus kebab-case aliases
// (geometric-sum, exponential-mixture, full-tree), case-insensitively.
// Throws std::invalid_argument otherwise.
Method parse_method(const std::string& name);

struct SimConfig {
  MutationParams params;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  Method method = Method::GeometricSum;

  // Throws std::invalid_argument unless params are valid and replicates >= 1.
  void validate() const;
};

struct ReplicateBatch {
  SimConfig config;
  std::vector<std::uint64_t> counts;
};

// R independent realizations of S_n. Replicate r is a pure function of
// (seed, method, params, r): the Philox key is {seed, method tag} and every
// counter coordinate is derived from (r, level), so batches are identical
// across runs, chunk sizes, and thread schedules.
ReplicateBatch simulate(const SimConfig& config);

// Plug-in sample cumulants (k2 = m2, k3 = m3, k4 = m4 - 3 m2^2, central
// moments about the sample mean; bias O(1/R), negligible at the replicate
// counts used here and documented). Standard errors come from the spread of
// the same estimator over B = min(100, R/4) equal contiguous sub-batches;
// for R < 8 no spread is available and the se fields are NaN. R >= 4 is
// required (k4 needs it); smaller batches throw std::invalid_argument.
struct SummaryStats {
  std::size_t replicates = 0;
  double mean = 0.0;
  double variance = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double se_mean = 0.0;
  double se_k2 = 0.0;
  double se_k3 = 0.0;
  double se_k4 = 0.0;
};

SummaryStats summarize(const ReplicateBatch& batch);
SummaryStats summarize_counts(const std::vector<std::uint64_t>& counts);

// Runs all three methods on the same (params, R). The method tag in the
// Philox key makes the three batches independent even at equal seed.
// Pairwise z-scores compare means and variances; |z| > 4 is flagged. With
// R < 8 standard errors are unavailable and the report declines comparison.
struct MethodComparison {
  Method a;
  Method b;
  double z_mean = 0.0;
  double z_variance = 0.0;
  bool flagged = false;
};

struct CrossMethodReport {
  bool declined = false;
  std::array<SummaryStats, 3> stats{};  // indexed by Method order
  std::vector<MethodComparison> comparisons;
};

CrossMethodReport cross_method_check(const MutationParams& params,
                                     std::size_t replicates,
                                     std::uint64_t seed);

// Stand-alone samplers for verification (distinct Philox method tags).
// poisson_batch: R draws from Poisson(lambda). gamma_poisson_batch: R draws
// of N | Lambda ~ Poisson(Lambda), Lambda ~ Gamma(shape, rate); used to
// check which Gamma rate reproduces the negative binomial pmf.
std::vector<std::uint64_t> poisson_batch(double lambda, std::size_t replicates,
                                         std::uint64_t seed);
std::vector<std::uint64_t> gamma_poisson_batch(double shape, double rate,
                                               std::size_t replicates,
                                               std::uint64_t seed);

}  // namespace segsites::sim
