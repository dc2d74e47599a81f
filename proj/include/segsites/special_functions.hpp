#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace segsites::special {

using BigInt = boost::multiprecision::cpp_int;

// Largest n for which Stirling rows are stored. Bell(64) ~ 10^77, far past
// double precision, hence exact integer storage.
inline constexpr int kMaxStirlingN = 64;

// Largest d for which set partitions may be materialized: Bell(12) =
// 4,213,597 partitions. Larger d must stream via for_each_set_partition.
inline constexpr int kMaxMaterializedPartitionD = 12;

// Stirling numbers of the second kind {n, k}, built once by the recurrence
// {n+1, k} = {n, k-1} + k {n, k} in exact arithmetic.
class StirlingTable {
 public:
  // Rows 0..max_n inclusive. Throws capacity_error past kMaxStirlingN.
  explicit StirlingTable(int max_n);

  // {n, k}; zero for k > n. Throws std::out_of_range if n exceeds the table
  // or either index is negative.
  const BigInt& stirling2(int n, int k) const;

  // {n, k} rounded to double (correctly rounded by the conversion; exact
  // below 2^53). Callers needing exactness use stirling2.
  double stirling2_d(int n, int k) const;

  int max_n() const { return max_n_; }

  // Fault-injection hooks for verification self-tests: add delta to one
  // entry, and undo every perturbation. Nothing else mutates the table.
  void perturb(int n, int k, std::int64_t delta);
  void reset_perturbations();

 private:
  struct Perturbation {
    int n;
    int k;
    std::int64_t delta;
  };

  int max_n_;
  std::vector<std::vector<BigInt>> rows_;
  std::vector<Perturbation> perturbations_;
};

// Shared process-wide table sized kMaxStirlingN, built on first use.
StirlingTable& stirling_table();

// Convenience accessors into the shared table.
const BigInt& stirling2(int n, int k);
double stirling2_d(int n, int k);

// Binomial coefficient C(n, k) computed exactly, then rounded to double.
double binomial_d(int n, int k);

// Generalized harmonic number H_n^(b) = sum_{j=1..n} j^-b, Neumaier-summed
// in ascending j. b = 1 is the plain harmonic number.
double harmonic(std::uint64_t n, int b = 1);

// Riemann zeta(b) for integer b >= 2: partial sum plus the midpoint-rule
// tail integral and its Euler-Maclaurin correction; the partial-sum length
// grows until the estimated truncation error is below rel_tol. rel_tol below
// 1e-14 is clamped (double precision floor, documented).
double zeta_int(int b, double rel_tol = 1e-12);

// Li_{-n}(u) for integer n >= 0, |u| < 1, via the closed form
//   Li_{-n}(u) = sum_{k=0..n} k! {n+1, k+1} (u / (1 - u))^{k+1},
// a finite sum over a Stirling row with compensated accumulation. O(n), no
// truncation; n + 1 is capped by the Stirling table capacity.
double polylog_neg_closed(int neg_order, double u);

// Same value by the defining series sum_{l>=1} l^n u^l, truncated when a
// term drops below rel_tol times the running sum twice in a row (the head
// of the series is not monotone). Throws truncation_error past max_terms.
// Independent of the Stirling machinery, so it serves as its oracle.
double polylog_neg_series(int neg_order, double u, double rel_tol = 1e-14,
                          std::size_t max_terms = 10'000'000);

// Finite-difference estimate of Li_{-(n+1)}(u) from the derivative identity
// Li_{-(n+1)}(u) = u d/du Li_{-n}(u), central difference with step h.
// Verification ties consecutive orders together with it.
double polylog_neg_fd_recursion(int neg_order, double u, double h = 1e-6);

// A set partition of {0..d-1}: blocks[i] lists the members of block i in
// ascending order; blocks are ordered by smallest member (restricted-growth
// order).
using SetPartition = std::vector<std::vector<int>>;

// Enumerate all partitions of a d-element set lazily; memory stays flat for
// any d, so callers may stream past the materialization limit.
void for_each_set_partition(int d,
                            const std::function<void(const SetPartition&)>& fn);

// Materialized variant; d <= kMaxMaterializedPartitionD or capacity_error.
std::vector<SetPartition> set_partitions(int d);

// Exact partition count (Bell number), d <= kMaxStirlingN.
BigInt bell_number(int d);

}  // namespace segsites::special
