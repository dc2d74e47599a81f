#pragma once

#include <cstddef>
#include <cstdint>

#include "segsites/kernels.hpp"

// Kernel bodies shared by the scalar and AVX2 builds, templated over a Pack
// of four doubles. Bit-identical results across builds rest on three rules:
// every operation maps to one correctly-rounded IEEE operation per lane
// (add/sub/mul/div/fma/floor/compare/select), the operation sequence is
// fixed here once for both builds, and log() is the polynomial below rather
// than libm. Contraction is disabled project-wide, so no extra fma can be
// introduced behind our backs.

namespace segsites::kernels::detail {

// log(x) for x in (0, 1), normal (to_unit's minimum 2^-54 is normal).
// Decompose x = m 2^e with m in [sqrt(1/2), sqrt(2)], then
// log m = 2 atanh(s) with s = (m - 1)/(m + 1):
//   log m = 2s + s t P(t),  t = s^2,  P(t) = sum_{k=0..9} 2/(2k+3) t^k.
// |s| <= 0.1716 so the dropped terms are below 1e-17 relative. ln 2 is
// split hi/lo; e is at most 54 in magnitude, so e * kLn2Hi is exact.
inline constexpr std::uint64_t kMantissaMask = 0x000FFFFFFFFFFFFFull;
inline constexpr std::uint64_t kOneBits = 0x3FF0000000000000ull;
inline constexpr std::uint64_t kTwo52Bits = 0x4330000000000000ull;
inline constexpr double kExpBias = 4503599627370496.0 + 1023.0;  // 2^52+1023
inline constexpr double kSqrt2 = 0x1.6a09e667f3bcdp+0;
inline constexpr double kLn2Hi = 0x1.62e42fee00000p-1;
inline constexpr double kLn2Lo = 0x1.a39ef35793c76p-33;
inline constexpr double kLogPoly[10] = {
    2.0 / 3.0,  2.0 / 5.0,  2.0 / 7.0,  2.0 / 9.0,  2.0 / 11.0,
    2.0 / 13.0, 2.0 / 15.0, 2.0 / 17.0, 2.0 / 19.0, 2.0 / 21.0,
};

template <class P>
inline typename P::D log_unit_pack(typename P::D x) {
  using D = typename P::D;
  const auto bits = P::to_bits(x);
  const D e_raw =
      P::sub(P::from_bits(P::or_i(P::shr52(bits), P::set1_i(kTwo52Bits))),
             P::set1(kExpBias));
  const D m = P::from_bits(P::or_i(P::and_i(bits, P::set1_i(kMantissaMask)),
                                   P::set1_i(kOneBits)));
  const auto big = P::gt(m, P::set1(kSqrt2));
  const D mm = P::select(big, P::mul(m, P::set1(0.5)), m);
  const D e = P::add(e_raw, P::select(big, P::set1(1.0), P::set1(0.0)));
  const D one = P::set1(1.0);
  const D s = P::div(P::sub(mm, one), P::add(mm, one));
  const D t = P::mul(s, s);
  D p = P::set1(kLogPoly[9]);
  for (int k = 8; k >= 0; --k) {
    p = P::fma(p, t, P::set1(kLogPoly[k]));
  }
  const D logm = P::fma(P::mul(s, t), p, P::add(s, s));
  return P::fma(e, P::set1(kLn2Hi), P::fma(e, P::set1(kLn2Lo), logm));
}

template <class P>
void log_unit_impl(const double* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; i += 4) {
    P::store(out + i, log_unit_pack<P>(P::load(u + i)));
  }
}

template <class P>
void geometric_accumulate_impl(const double* u, double inv_log_q, double* acc,
                               std::size_t n) {
  const auto ilq = P::set1(inv_log_q);
  for (std::size_t i = 0; i < n; i += 4) {
    const auto g = P::floor(P::mul(log_unit_pack<P>(P::load(u + i)), ilq));
    P::store(acc + i, P::add(P::load(acc + i), g));
  }
}

template <class P>
void exp_accumulate_impl(const double* u, double weight, double* acc,
                         std::size_t n) {
  const auto w = P::set1(-weight);
  for (std::size_t i = 0; i < n; i += 4) {
    const auto l = log_unit_pack<P>(P::load(u + i));
    P::store(acc + i, P::fma(w, l, P::load(acc + i)));
  }
}

// Neumaier step, vectorized: compensation picks (s - t) + x or (x - t) + s
// by comparing magnitudes per lane.
template <class P>
inline void neumaier_add(typename P::D& sum, typename P::D& comp,
                         typename P::D x) {
  const auto t = P::add(sum, x);
  const auto m = P::ge(P::abs(sum), P::abs(x));
  const auto big = P::select(m, sum, x);
  const auto small = P::select(m, x, sum);
  comp = P::add(comp, P::add(P::sub(big, t), small));
  sum = t;
}

template <class P>
CentralSums central_sums_impl(const double* x, std::size_t n, double center) {
  using D = typename P::D;
  const D c = P::set1(center);
  const D zero = P::set1(0.0);
  D s1 = zero, c1 = zero, s2 = zero, c2 = zero;
  D s3 = zero, c3 = zero, s4 = zero, c4 = zero;
  for (std::size_t i = 0; i < n; i += 4) {
    const D d = P::sub(P::load(x + i), c);
    const D p2 = P::mul(d, d);
    const D p3 = P::mul(p2, d);
    const D p4 = P::mul(p3, d);
    neumaier_add<P>(s1, c1, d);
    neumaier_add<P>(s2, c2, p2);
    neumaier_add<P>(s3, c3, p3);
    neumaier_add<P>(s4, c4, p4);
  }
  // Lane merge in fixed order: v_l = sum_l + comp_l, then ((v0+v1)+v2)+v3.
  auto merge = [](typename P::D s, typename P::D comp) {
    double sv[4];
    double cv[4];
    P::store(sv, s);
    P::store(cv, comp);
    const double v0 = sv[0] + cv[0];
    const double v1 = sv[1] + cv[1];
    const double v2 = sv[2] + cv[2];
    const double v3 = sv[3] + cv[3];
    return ((v0 + v1) + v2) + v3;
  };
  CentralSums r;
  r.d1 = merge(s1, c1);
  r.d2 = merge(s2, c2);
  r.d3 = merge(s3, c3);
  r.d4 = merge(s4, c4);
  return r;
}

}  // namespace segsites::kernels::detail
