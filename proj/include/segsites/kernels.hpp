#pragma once

#include <cstddef>
#include <string>

namespace segsites::kernels {

// The hot loops (log-inversion geometric sampling, exponential accumulation,
// central-moment reductions) exist in a scalar build and an AVX2+FMA build of
// the same templated bodies. Both are compiled with contraction disabled and
// every fused multiply-add written explicitly, so the two builds produce
// bit-identical doubles; tests/test_rng_kernels.cpp enforces this on hardware
// that has AVX2. Dispatch picks the widest supported build at first use.

enum class Isa { scalar, avx2 };

// ISA chosen by runtime dispatch (or forced below).
Isa active_isa();

// Whether the running CPU can execute the given build.
bool isa_supported(Isa isa);

// Test hook: pin dispatch to one build. Throws std::invalid_argument if the
// CPU cannot execute it.
void force_isa(Isa isa);

const char* isa_name(Isa isa);

// out[i] = log(u[i]). Portable polynomial evaluation, not libm, so scalar and
// AVX2 agree bitwise. Inputs must lie in (0, 1); to_unit guarantees this.
void log_unit(const double* u, double* out, std::size_t n);

// acc[i] += floor(log(u[i]) * inv_log_q): geometric(success s) sample count
// via inversion when inv_log_q = 1 / log(1 - s).
void geometric_accumulate(const double* u, double inv_log_q, double* acc,
                          std::size_t n);

// acc[i] += weight * (-log(u[i])): an Exponential(1) draw scaled by weight.
void exp_accumulate(const double* u, double weight, double* acc,
                    std::size_t n);

// Power sums of deviations from a fixed center, each accumulated with
// four-lane Neumaier compensation and merged in a fixed lane order, so the
// result is independent of chunking (for n % 4 == 0) and of ISA.
struct CentralSums {
  double d1 = 0.0;  // sum (x - c)
  double d2 = 0.0;  // sum (x - c)^2
  double d3 = 0.0;  // sum (x - c)^3
  double d4 = 0.0;  // sum (x - c)^4
};

CentralSums central_sums(const double* x, std::size_t n, double center);

// All kernels require n % 4 == 0; callers pad their buffers.
inline constexpr std::size_t kLaneWidth = 4;

}  // namespace segsites::kernels
