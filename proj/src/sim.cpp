#include "segsites/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "segsites/kernels.hpp"
#include "segsites/rng.hpp"

namespace segsites::sim {

namespace {

// Philox key = {seed, method tag}; the tag separates the three mechanisms
// (and the stand-alone samplers) so equal seeds still give independent
// streams. Counter layout per method, with r the replicate index and k the
// coalescent level:
//   bulk uniforms (one per replicate): block {r >> 2, k, 0, 0}, lane r & 3
//   data-dependent streams (Poisson, Gamma): {r, k or 0, word2 counts, 1}
// word3 = 1 keeps streams disjoint from bulk blocks for every (r, k).
constexpr std::uint64_t kTagGeometricSum = 1;
constexpr std::uint64_t kTagExponentialMixture = 2;
constexpr std::uint64_t kTagFullTree = 3;
constexpr std::uint64_t kTagPoissonBatch = 4;
constexpr std::uint64_t kTagGammaPoisson = 5;

constexpr std::size_t kChunk = 4096;  // replicates per chunk, multiple of 4

std::size_t pad4(std::size_t n) { return (n + 3) & ~static_cast<std::size_t>(3); }

std::uint64_t poisson_draw(double lambda, rng::UniformStream& stream) {
  if (lambda < 10.0) {
    // Knuth's product method; exact and cheap at small rates.
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double prod = 1.0;
    do {
      prod *= stream.next_unit();
      ++k;
    } while (prod > limit);
    return k - 1;
  }
  // Hoermann's PTRS transformed rejection, valid for lambda >= 10.
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = stream.next_unit() - 0.5;
    const double v = stream.next_unit();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        kd * loglam - lambda - std::lgamma(kd + 1.0)) {
      return static_cast<std::uint64_t>(kd);
    }
  }
}

double normal_draw(rng::UniformStream& stream) {
  const double u1 = stream.next_unit();
  const double u2 = stream.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Marsaglia-Tsang squeeze; shape < 1 boosted via Gamma(a) =
// Gamma(a+1) U^{1/a}. Rate 1; callers divide.
double gamma_draw(double shape, rng::UniformStream& stream) {
  if (shape < 1.0) {
    const double x = gamma_draw(shape + 1.0, stream);
    return x * std::pow(stream.next_unit(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z;
    double v;
    do {
      z = normal_draw(stream);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.next_unit();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

void run_geometric_sum(const SimConfig& config, const rng::Key& key,
                       std::vector<std::uint64_t>& counts) {
  const std::size_t r_total = config.replicates;
  std::vector<double> u(kChunk);
  std::vector<double> acc(kChunk);
  for (std::size_t r0 = 0; r0 < r_total; r0 += kChunk) {
    const std::size_t c = std::min(kChunk, r_total - r0);
    const std::size_t cpad = pad4(c);
    std::fill(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(cpad),
              0.0);
    for (int k = 2; k <= config.params.n; ++k) {
      rng::fill_unit_lane(key, static_cast<std::uint64_t>(k), 0, r0, c,
                          u.data());
      std::fill(u.begin() + static_cast<std::ptrdiff_t>(c),
                u.begin() + static_cast<std::ptrdiff_t>(cpad), 0.5);
      // G ~ Geom(success (k-1)/(k-1+theta)) by inversion:
      // floor(log U / log q) with failure probability q.
      const double q =
          config.params.theta / (config.params.theta + (k - 1.0));
      kernels::geometric_accumulate(u.data(), 1.0 / std::log(q), acc.data(),
                                    cpad);
    }
    for (std::size_t i = 0; i < c; ++i) {
      counts[r0 + i] = static_cast<std::uint64_t>(acc[i]);
    }
  }
}

void run_exponential_mixture(const SimConfig& config, const rng::Key& key,
                             std::vector<std::uint64_t>& counts) {
  const std::size_t r_total = config.replicates;
  std::vector<double> u(kChunk);
  std::vector<double> lam(kChunk);
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t r0 = 0; r0 < r_total; r0 += kChunk) {
    const std::size_t c = std::min(kChunk, r_total - r0);
    const std::size_t cpad = pad4(c);
    for (int k = 2; k <= config.params.n; ++k) {
      rng::fill_unit_lane(key, static_cast<std::uint64_t>(k), 0, r0, c,
                          u.data());
      std::fill(u.begin() + static_cast<std::ptrdiff_t>(c),
                u.begin() + static_cast<std::ptrdiff_t>(cpad), 0.5);
      // tau_k ~ Exp(k(k-1)/2), so the Poisson rate theta k tau_k / 2
      // collapses to theta (-log U)/(k-1).
      std::fill(lam.begin(), lam.begin() + static_cast<std::ptrdiff_t>(cpad),
                0.0);
      kernels::exp_accumulate(u.data(), config.params.theta / (k - 1.0),
                              lam.data(), cpad);
      for (std::size_t i = 0; i < c; ++i) {
        rng::UniformStream stream(key, r0 + i, static_cast<std::uint64_t>(k),
                                  1);
        counts[r0 + i] += poisson_draw(lam[i], stream);
      }
    }
  }
}

void run_full_tree(const SimConfig& config, const rng::Key& key,
                   std::vector<std::uint64_t>& counts) {
  const std::size_t r_total = config.replicates;
  std::vector<double> u(kChunk);
  std::vector<double> lam(kChunk);
  for (std::size_t r0 = 0; r0 < r_total; r0 += kChunk) {
    const std::size_t c = std::min(kChunk, r_total - r0);
    const std::size_t cpad = pad4(c);
    std::fill(lam.begin(), lam.begin() + static_cast<std::ptrdiff_t>(cpad),
              0.0);
    for (int k = 2; k <= config.params.n; ++k) {
      rng::fill_unit_lane(key, static_cast<std::uint64_t>(k), 0, r0, c,
                          u.data());
      std::fill(u.begin() + static_cast<std::ptrdiff_t>(c),
                u.begin() + static_cast<std::ptrdiff_t>(cpad), 0.5);
      // theta/2 * k tau_k accumulates to theta/2 * total tree length.
      kernels::exp_accumulate(u.data(), config.params.theta / (k - 1.0),
                              lam.data(), cpad);
    }
    for (std::size_t i = 0; i < c; ++i) {
      rng::UniformStream stream(key, r0 + i, 0, 1);
      counts[r0 + i] = poisson_draw(lam[i], stream);
    }
  }
}

struct PlugIn {
  double mean = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
};

PlugIn plug_in_cumulants(const std::uint64_t* data, std::size_t len,
                         std::vector<double>& scratch) {
  unsigned __int128 total = 0;
  for (std::size_t i = 0; i < len; ++i) total += data[i];
  const double mean = static_cast<double>(total) / static_cast<double>(len);
  const std::size_t lpad = pad4(len);
  scratch.resize(lpad);
  for (std::size_t i = 0; i < len; ++i) {
    scratch[i] = static_cast<double>(data[i]);
  }
  // Padding with the center adds exact zeros to every power sum.
  for (std::size_t i = len; i < lpad; ++i) scratch[i] = mean;
  const kernels::CentralSums cs =
      kernels::central_sums(scratch.data(), lpad, mean);
  const double r = static_cast<double>(len);
  const double m2 = cs.d2 / r;
  const double m3 = cs.d3 / r;
  const double m4 = cs.d4 / r;
  PlugIn p;
  p.mean = mean;
  p.k2 = m2;
  p.k3 = m3;
  p.k4 = m4 - 3.0 * m2 * m2;
  return p;
}

double spread_se(const std::vector<double>& estimates) {
  const std::size_t b = estimates.size();
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(b);
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  // sd of one sub-batch estimate, scaled to the full-batch estimator.
  return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::GeometricSum:
      return "GeometricSum";
    case Method::ExponentialMixture:
      return "ExponentialMixture";
    case Method::FullTree:
      return "FullTree";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  std::string folded;
  for (char ch : name) {
    if (ch == '-' || ch == '_') continue;
    folded.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(ch))));
  }
  if (folded == "geometricsum") return Method::GeometricSum;
  if (folded == "exponentialmixture") return Method::ExponentialMixture;
  if (folded == "fulltree") return Method::FullTree;
  throw std::invalid_argument(
      "unknown method '" + name +
      "' (expected GeometricSum, ExponentialMixture, or FullTree)");
}

void SimConfig::validate() const {
  params.validate();
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }
}

ReplicateBatch simulate(const SimConfig& config) {
  config.validate();
  ReplicateBatch batch;
  batch.config = config;
  batch.counts.resize(config.replicates);
  switch (config.method) {
    case Method::GeometricSum:
      run_geometric_sum(config, {config.seed, kTagGeometricSum}, batch.counts);
      break;
    case Method::ExponentialMixture:
      run_exponential_mixture(config, {config.seed, kTagExponentialMixture},
                              batch.counts);
      break;
    case Method::FullTree:
      run_full_tree(config, {config.seed, kTagFullTree}, batch.counts);
      break;
  }
  return batch;
}

SummaryStats summarize_counts(const std::vector<std::uint64_t>& counts) {
  const std::size_t r = counts.size();
  if (r < 4) {
    throw std::invalid_argument(
        "summarize needs >= 4 replicates for the fourth cumulant, got " +
        std::to_string(r));
  }
  std::vector<double> scratch;
  const PlugIn full = plug_in_cumulants(counts.data(), r, scratch);
  SummaryStats stats;
  stats.replicates = r;
  stats.mean = full.mean;
  stats.variance = full.k2;
  stats.k3 = full.k3;
  stats.k4 = full.k4;
  if (r < 8) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    stats.se_mean = stats.se_k2 = stats.se_k3 = stats.se_k4 = nan;
    return stats;
  }
  const std::size_t b = std::min<std::size_t>(100, r / 4);
  const std::size_t len = r / b;
  std::vector<double> means, k2s, k3s, k4s;
  for (std::size_t i = 0; i < b; ++i) {
    const PlugIn sub = plug_in_cumulants(counts.data() + i * len, len, scratch);
    means.push_back(sub.mean);
    k2s.push_back(sub.k2);
    k3s.push_back(sub.k3);
    k4s.push_back(sub.k4);
  }
  stats.se_mean = spread_se(means);
  stats.se_k2 = spread_se(k2s);
  stats.se_k3 = spread_se(k3s);
  stats.se_k4 = spread_se(k4s);
  return stats;
}

SummaryStats summarize(const ReplicateBatch& batch) {
  return summarize_counts(batch.counts);
}

CrossMethodReport cross_method_check(const MutationParams& params,
                                     std::size_t replicates,
                                     std::uint64_t seed) {
  params.validate();
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }
  CrossMethodReport report;
  if (replicates < 8) {
    report.declined = true;
    return report;
  }
  constexpr Method kMethods[3] = {Method::GeometricSum,
                                  Method::ExponentialMixture,
                                  Method::FullTree};
  for (int i = 0; i < 3; ++i) {
    const SimConfig config{params, replicates, seed, kMethods[i]};
    report.stats[static_cast<std::size_t>(i)] =
        summarize(simulate(config));
  }
  auto z_score = [](double a, double b, double se_a, double se_b) {
    const double denom = std::sqrt(se_a * se_a + se_b * se_b);
    if (denom == 0.0) {
      return a == b ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (a - b) / denom;
  };
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const auto& sa = report.stats[static_cast<std::size_t>(i)];
      const auto& sb = report.stats[static_cast<std::size_t>(j)];
      MethodComparison cmp;
      cmp.a = kMethods[i];
      cmp.b = kMethods[j];
      cmp.z_mean = z_score(sa.mean, sb.mean, sa.se_mean, sb.se_mean);
      cmp.z_variance = z_score(sa.variance, sb.variance, sa.se_k2, sb.se_k2);
      cmp.flagged =
          std::fabs(cmp.z_mean) > 4.0 || std::fabs(cmp.z_variance) > 4.0;
      report.comparisons.push_back(cmp);
    }
  }
  return report;
}

std::vector<std::uint64_t> poisson_batch(double lambda, std::size_t replicates,
                                         std::uint64_t seed) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Poisson rate must be positive");
  }
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }
  const rng::Key key{seed, kTagPoissonBatch};
  std::vector<std::uint64_t> counts(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    rng::UniformStream stream(key, r, 0, 1);
    counts[r] = poisson_draw(lambda, stream);
  }
  return counts;
}

std::vector<std::uint64_t> gamma_poisson_batch(double shape, double rate,
                                               std::size_t replicates,
                                               std::uint64_t seed) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("Gamma shape and rate must be positive");
  }
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }
  const rng::Key key{seed, kTagGammaPoisson};
  std::vector<std::uint64_t> counts(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    rng::UniformStream stream(key, r, 0, 1);
    const double lambda = gamma_draw(shape, stream) / rate;
    counts[r] = poisson_draw(lambda, stream);
  }
  return counts;
}

}  // namespace segsites::sim
