#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace segsites::asymptotics {

// One LLN diagnostic row: sigma2 = Var(S_n / E S_n) from the analytic
// cumulants, its asymptote 1/(theta log n), and their ratio
// sigma2 * theta * log n (which tends to 1).
struct LlnRow {
  int n = 0;
  double sigma2 = 0.0;
  double asymptote = 0.0;
  double ratio = 0.0;
};

std::vector<LlnRow> lln_table(double theta, const std::vector<int>& grid);

// One CLT diagnostic row: for each order i in 3..max_order, the normalized
// cumulant kappa_i / kappa_2^{i/2} of the standardized S_n, and its
// asymptotic comparator theta^{1 - i/2} / (log n)^{(i-2)/2}. Standardized
// orders 1 and 2 are identically 0 and 1 and are not tabulated.
struct CltRow {
  int n = 0;
  std::vector<double> normalized;  // index 0 holds order 3
  std::vector<double> comparator;
};

std::vector<CltRow> clt_table(double theta, const std::vector<int>& grid,
                              int max_order);

// Simulates S_n (GeometricSum method), standardizes by the ANALYTIC mean and
// standard deviation, and reports the Kolmogorov-Smirnov distance between
// the empirical CDF and the standard normal CDF, evaluated exactly from the
// integer histogram: at each support point both the left and right limits of
// the empirical CDF are compared against Phi. Also reports sample skewness
// and excess kurtosis next to their analytic values. S_n sits on an integer
// lattice, so the distance never falls below roughly max_m pmf(m)/2 no
// matter how large n or R; the fixture threshold in the acceptance suite is
// calibrated accordingly.
struct CltCheckReport {
  std::size_t replicates = 0;
  double ks_distance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double analytic_skewness = 0.0;
  double analytic_excess_kurtosis = 0.0;
};

CltCheckReport monte_carlo_clt_check(double theta, int n,
                                     std::size_t replicates,
                                     std::uint64_t seed);

// Standard normal CDF (shared by the KS computation and tests).
double normal_cdf(double z);

// Default diagnostic grid 2^1 .. 2^20.
std::vector<int> default_grid();

}  // namespace segsites::asymptotics
