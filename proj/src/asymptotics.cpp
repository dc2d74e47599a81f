#include "segsites/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "segsites/cumulants.hpp"
#include "segsites/sim.hpp"

namespace segsites::asymptotics {

namespace {

void check_grid(const std::vector<int>& grid) {
  if (grid.empty()) {
    throw std::invalid_argument("grid must be non-empty");
  }
  int prev = 1;
  for (int n : grid) {
    if (n < 2) {
      throw std::invalid_argument("grid entries must be >= 2");
    }
    if (n <= prev) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
    prev = n;
  }
}

}  // namespace

std::vector<LlnRow> lln_table(double theta, const std::vector<int>& grid) {
  check_grid(grid);
  std::vector<LlnRow> rows;
  rows.reserve(grid.size());
  for (int n : grid) {
    const MutationParams params{theta, n};
    const double mean = cumulants::segsites_mean(params);
    const double var = cumulants::segsites_var(params);
    LlnRow row;
    row.n = n;
    row.sigma2 = var / (mean * mean);
    const double logn = std::log(static_cast<double>(n));
    row.asymptote = 1.0 / (theta * logn);
    row.ratio = row.sigma2 * theta * logn;
    rows.push_back(row);
  }
  return rows;
}

std::vector<CltRow> clt_table(double theta, const std::vector<int>& grid,
                              int max_order) {
  check_grid(grid);
  if (max_order < 3) {
    throw std::invalid_argument("clt_table needs max_order >= 3, got " +
                                std::to_string(max_order));
  }
  std::vector<CltRow> rows;
  rows.reserve(grid.size());
  for (int n : grid) {
    const MutationParams params{theta, n};
    const cumulants::CumulantVector kappa =
        cumulants::segsites_cumulants(params, max_order);
    const double k2 = kappa.values[1];
    CltRow row;
    row.n = n;
    const double logn = std::log(static_cast<double>(n));
    for (int i = 3; i <= max_order; ++i) {
      const double id = static_cast<double>(i);
      row.normalized.push_back(kappa.values[static_cast<std::size_t>(i) - 1] /
                               std::pow(k2, id / 2.0));
      row.comparator.push_back(std::pow(theta, 1.0 - id / 2.0) *
                               std::pow(logn, -(id - 2.0) / 2.0));
    }
    rows.push_back(row);
  }
  return rows;
}

CltCheckReport monte_carlo_clt_check(double theta, int n,
                                     std::size_t replicates,
                                     std::uint64_t seed) {
  if (replicates < 100'000) {
    throw std::invalid_argument(
        "monte_carlo_clt_check needs >= 1e5 replicates");
  }
  const MutationParams params{theta, n};
  params.validate();
  const double mean = cumulants::segsites_mean(params);
  const double sd = std::sqrt(cumulants::segsites_var(params));

  const sim::SimConfig config{params, replicates, seed,
                              sim::Method::GeometricSum};
  const sim::ReplicateBatch batch = sim::simulate(config);

  std::uint64_t max_count = 0;
  for (std::uint64_t c : batch.counts) max_count = std::max(max_count, c);
  std::vector<std::uint64_t> hist(max_count + 1, 0);
  for (std::uint64_t c : batch.counts) ++hist[c];

  // Exact KS distance between the empirical step CDF and the continuous
  // normal CDF: at each lattice point compare Phi against both the left and
  // right limits of the empirical CDF.
  const double r = static_cast<double>(replicates);
  double distance = 0.0;
  double cum_before = 0.0;
  for (std::uint64_t m = 0; m <= max_count; ++m) {
    const double cum_after =
        cum_before + static_cast<double>(hist[m]) / r;
    const double phi = normal_cdf((static_cast<double>(m) - mean) / sd);
    distance = std::max(distance, std::fabs(cum_after - phi));
    distance = std::max(distance, std::fabs(cum_before - phi));
    cum_before = cum_after;
  }

  const sim::SummaryStats stats = sim::summarize(batch);
  CltCheckReport report;
  report.replicates = replicates;
  report.ks_distance = distance;
  report.skewness = stats.k3 / std::pow(stats.variance, 1.5);
  report.excess_kurtosis = stats.k4 / (stats.variance * stats.variance);
  const cumulants::CumulantVector kappa = cumulants::segsites_cumulants(params, 4);
  report.analytic_skewness =
      kappa.values[2] / std::pow(kappa.values[1], 1.5);
  report.analytic_excess_kurtosis =
      kappa.values[3] / (kappa.values[1] * kappa.values[1]);
  return report;
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

std::vector<int> default_grid() {
  std::vector<int> grid;
  for (int j = 1; j <= 20; ++j) grid.push_back(1 << j);
  return grid;
}

}  // namespace segsites::asymptotics
