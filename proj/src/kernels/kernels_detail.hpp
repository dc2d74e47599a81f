#pragma once

#include <cstddef>

#include "segsites/kernels.hpp"

// Per-ISA builds of the shared kernel bodies (pack_ops.hpp). dispatch.cpp
// routes the public API here.

namespace segsites::kernels::detail {

namespace scalar {
void log_unit(const double* u, double* out, std::size_t n);
void geometric_accumulate(const double* u, double inv_log_q, double* acc,
                          std::size_t n);
void exp_accumulate(const double* u, double weight, double* acc,
                    std::size_t n);
CentralSums central_sums(const double* x, std::size_t n, double center);
}  // namespace scalar

#if defined(SEGSITES_HAVE_AVX2)
namespace avx2 {
void log_unit(const double* u, double* out, std::size_t n);
void geometric_accumulate(const double* u, double inv_log_q, double* acc,
                          std::size_t n);
void exp_accumulate(const double* u, double weight, double* acc,
                    std::size_t n);
CentralSums central_sums(const double* x, std::size_t n, double center);
}  // namespace avx2
#endif

}  // namespace segsites::kernels::detail
