#include <immintrin.h>

#include "kernels_detail.hpp"
#include "pack_ops.hpp"

// AVX2+FMA build of the kernel bodies. Compiled with -mavx2 -mfma only;
// selected at runtime by dispatch.cpp after a CPUID check.

namespace segsites::kernels::detail {

namespace {

struct AvxPack {
  using D = __m256d;
  using I = __m256i;
  using M = __m256d;  // all-ones / all-zeros lanes from _mm256_cmp_pd

  static D load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, D a) { _mm256_storeu_pd(p, a); }
  static D set1(double x) { return _mm256_set1_pd(x); }
  static I set1_i(std::uint64_t x) {
    return _mm256_set1_epi64x(static_cast<long long>(x));
  }
  static D add(D a, D b) { return _mm256_add_pd(a, b); }
  static D sub(D a, D b) { return _mm256_sub_pd(a, b); }
  static D mul(D a, D b) { return _mm256_mul_pd(a, b); }
  static D div(D a, D b) { return _mm256_div_pd(a, b); }
  static D fma(D a, D b, D c) { return _mm256_fmadd_pd(a, b, c); }
  static D floor(D a) { return _mm256_floor_pd(a); }
  static D abs(D a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }
  static M gt(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
  static M ge(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
  static D select(M m, D a, D b) { return _mm256_blendv_pd(b, a, m); }
  static I to_bits(D a) { return _mm256_castpd_si256(a); }
  static D from_bits(I a) { return _mm256_castsi256_pd(a); }
  static I shr52(I a) { return _mm256_srli_epi64(a, 52); }
  static I and_i(I a, I b) { return _mm256_and_si256(a, b); }
  static I or_i(I a, I b) { return _mm256_or_si256(a, b); }
};

}  // namespace

namespace avx2 {

void log_unit(const double* u, double* out, std::size_t n) {
  log_unit_impl<AvxPack>(u, out, n);
}

void geometric_accumulate(const double* u, double inv_log_q, double* acc,
                          std::size_t n) {
  geometric_accumulate_impl<AvxPack>(u, inv_log_q, acc, n);
}

void exp_accumulate(const double* u, double weight, double* acc,
                    std::size_t n) {
  exp_accumulate_impl<AvxPack>(u, weight, acc, n);
}

CentralSums central_sums(const double* x, std::size_t n, double center) {
  return central_sums_impl<AvxPack>(x, n, center);
}

}  // namespace avx2

}  // namespace segsites::kernels::detail
