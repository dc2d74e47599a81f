#include "segsites/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "segsites/errors.hpp"
#include "segsites/numeric.hpp"

namespace segsites::special {

namespace {

double pow_int(double base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

void check_polylog_arg(int neg_order, double u) {
  if (neg_order < 0) {
    throw std::invalid_argument("polylog negative order must be >= 0, got " +
                                std::to_string(neg_order));
  }
  if (!(std::fabs(u) < 1.0)) {
    throw std::domain_error("polylog argument must satisfy |u| < 1, got " +
                            std::to_string(u));
  }
}

}  // namespace

StirlingTable::StirlingTable(int max_n) : max_n_(max_n) {
  if (max_n < 0) {
    throw std::invalid_argument("StirlingTable max_n must be >= 0");
  }
  if (max_n > kMaxStirlingN) {
    throw capacity_error("StirlingTable capacity is n <= " +
                         std::to_string(kMaxStirlingN) + ", requested " +
                         std::to_string(max_n));
  }
  rows_.resize(static_cast<std::size_t>(max_n) + 1);
  rows_[0] = {BigInt(1)};
  for (int n = 1; n <= max_n; ++n) {
    auto& row = rows_[static_cast<std::size_t>(n)];
    const auto& prev = rows_[static_cast<std::size_t>(n) - 1];
    row.assign(static_cast<std::size_t>(n) + 1, BigInt(0));
    for (int k = 1; k <= n; ++k) {
      BigInt v = prev[static_cast<std::size_t>(k) - 1];
      if (k < n) v += k * prev[static_cast<std::size_t>(k)];
      row[static_cast<std::size_t>(k)] = v;
    }
  }
}

const BigInt& StirlingTable::stirling2(int n, int k) const {
  static const BigInt zero(0);
  if (n < 0 || k < 0) {
    throw std::out_of_range("stirling2 indices must be >= 0");
  }
  if (n > max_n_) {
    throw capacity_error("stirling2 table holds n <= " +
                         std::to_string(max_n_) + ", requested n = " +
                         std::to_string(n));
  }
  if (k > n) return zero;
  return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

double StirlingTable::stirling2_d(int n, int k) const {
  return stirling2(n, k).convert_to<double>();
}

void StirlingTable::perturb(int n, int k, std::int64_t delta) {
  if (n < 0 || n > max_n_ || k < 0 || k > n) {
    throw std::out_of_range("perturb target outside table");
  }
  rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] += delta;
  perturbations_.push_back({n, k, delta});
}

void StirlingTable::reset_perturbations() {
  for (auto it = perturbations_.rbegin(); it != perturbations_.rend(); ++it) {
    rows_[static_cast<std::size_t>(it->n)][static_cast<std::size_t>(it->k)] -=
        it->delta;
  }
  perturbations_.clear();
}

StirlingTable& stirling_table() {
  static StirlingTable table(kMaxStirlingN);
  return table;
}

const BigInt& stirling2(int n, int k) { return stirling_table().stirling2(n, k); }

double stirling2_d(int n, int k) { return stirling_table().stirling2_d(n, k); }

double binomial_d(int n, int k) {
  if (n < 0 || k < 0) {
    throw std::out_of_range("binomial indices must be >= 0");
  }
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  BigInt r(1);
  for (int i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;  // exact: r is binom(n-k+i, i) after this step
  }
  return r.convert_to<double>();
}

double harmonic(std::uint64_t n, int b) {
  if (n < 1) {
    throw std::invalid_argument("harmonic requires n >= 1");
  }
  if (b < 1) {
    throw std::invalid_argument("harmonic requires order b >= 1");
  }
  CompensatedSum sum;
  for (std::uint64_t j = 1; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    sum.add(b == 1 ? 1.0 / jd : 1.0 / pow_int(jd, b));
  }
  return sum.value();
}

double zeta_int(int b, double rel_tol) {
  if (b < 2) {
    throw std::invalid_argument("zeta_int requires b >= 2, got " +
                                std::to_string(b));
  }
  if (!(rel_tol > 0.0)) {
    throw std::invalid_argument("zeta_int rel_tol must be positive");
  }
  const double tol = std::max(rel_tol, 1e-14);  // double-precision floor
  // Partial sum to N, then the midpoint tail integral and its first
  // Euler-Maclaurin correction; the next correction bounds the error.
  std::uint64_t n = 100;
  const double bd = static_cast<double>(b);
  while (n < 10'000'000) {
    const double residual =
        bd * (bd + 1.0) * (bd + 2.0) * std::pow(n + 0.5, -bd - 3.0) / 1920.0;
    if (residual < tol) break;
    n *= 10;
  }
  CompensatedSum sum;
  for (std::uint64_t j = 1; j <= n; ++j) {
    sum.add(1.0 / pow_int(static_cast<double>(j), b));
  }
  const double edge = static_cast<double>(n) + 0.5;
  const double tail = std::pow(edge, 1.0 - bd) / (bd - 1.0) -
                      bd * std::pow(edge, -bd - 1.0) / 24.0;
  return sum.value() + tail;
}

double polylog_neg_closed(int neg_order, double u) {
  check_polylog_arg(neg_order, u);
  const int n = neg_order;
  const auto& table = stirling_table();
  if (n + 1 > table.max_n()) {
    throw capacity_error("polylog_neg_closed needs Stirling row " +
                         std::to_string(n + 1) + ", table holds " +
                         std::to_string(table.max_n()));
  }
  const double w = u / (1.0 - u);
  CompensatedSum sum;
  double k_factorial = 1.0;
  double w_pow = w;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      k_factorial *= k;
      w_pow *= w;
    }
    sum.add(k_factorial * table.stirling2_d(n + 1, k + 1) * w_pow);
  }
  return sum.value();
}

double polylog_neg_series(int neg_order, double u, double rel_tol,
                          std::size_t max_terms) {
  check_polylog_arg(neg_order, u);
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw std::invalid_argument("polylog_neg_series rel_tol must be in (0,1)");
  }
  if (u == 0.0) return 0.0;
  CompensatedSum sum;
  double u_pow = 1.0;
  int below = 0;
  for (std::size_t l = 1; l <= max_terms; ++l) {
    u_pow *= u;
    const double term = pow_int(static_cast<double>(l), neg_order) * u_pow;
    sum.add(term);
    // The head of the series grows before it decays; require two consecutive
    // terms below tolerance so the truncation rule cannot fire on the way up.
    if (std::fabs(term) < rel_tol * std::fabs(sum.value()) ||
        std::fabs(term) < 1e-300) {
      if (++below >= 2) return sum.value();
    } else {
      below = 0;
    }
  }
  throw truncation_error("polylog series did not converge within " +
                         std::to_string(max_terms) + " terms at u = " +
                         std::to_string(u));
}

double polylog_neg_fd_recursion(int neg_order, double u, double h) {
  check_polylog_arg(neg_order, u);
  if (!(h > 0.0) || std::fabs(u) + h >= 1.0) {
    throw std::domain_error("finite-difference step leaves |u| < 1");
  }
  const double fp = polylog_neg_closed(neg_order, u + h);
  const double fm = polylog_neg_closed(neg_order, u - h);
  return u * (fp - fm) / (2.0 * h);
}

namespace {

// Restricted growth strings: a[i] <= 1 + max(a[0..i-1]), enumerated in
// lexicographic order by depth-first recursion.
template <class Fn>
void rgs_recurse(std::vector<int>& a, int i, int next_block, const Fn& emit) {
  const int d = static_cast<int>(a.size());
  if (i == d) {
    emit(a, next_block);
    return;
  }
  for (int v = 0; v < next_block; ++v) {
    a[static_cast<std::size_t>(i)] = v;
    rgs_recurse(a, i + 1, next_block, emit);
  }
  a[static_cast<std::size_t>(i)] = next_block;
  rgs_recurse(a, i + 1, next_block + 1, emit);
}

}  // namespace

void for_each_set_partition(
    int d, const std::function<void(const SetPartition&)>& fn) {
  if (d < 1) {
    throw capacity_error("set partitions need d >= 1, got " +
                         std::to_string(d));
  }
  std::vector<int> a(static_cast<std::size_t>(d), 0);
  SetPartition partition;
  rgs_recurse(a, 1, 1, [&](const std::vector<int>& rgs, int blocks) {
    partition.assign(static_cast<std::size_t>(blocks), {});
    for (int i = 0; i < d; ++i) {
      partition[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])]
          .push_back(i);
    }
    fn(partition);
  });
}

std::vector<SetPartition> set_partitions(int d) {
  if (d > kMaxMaterializedPartitionD) {
    throw capacity_error("set_partitions materializes d <= " +
                         std::to_string(kMaxMaterializedPartitionD) +
                         ", requested " + std::to_string(d) +
                         "; stream via for_each_set_partition");
  }
  std::vector<SetPartition> all;
  for_each_set_partition(d, [&](const SetPartition& p) { all.push_back(p); });
  return all;
}

BigInt bell_number(int d) {
  if (d < 0) {
    throw std::out_of_range("bell_number requires d >= 0");
  }
  const auto& table = stirling_table();
  if (d > table.max_n()) {
    throw capacity_error("bell_number capped at d <= " +
                         std::to_string(table.max_n()));
  }
  BigInt sum(0);
  for (int k = 0; k <= d; ++k) sum += table.stirling2(d, k);
  return sum;
}

}  // namespace segsites::special
