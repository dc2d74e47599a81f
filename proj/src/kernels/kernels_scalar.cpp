#include <cmath>
#include <cstdint>
#include <cstring>

#include "kernels_detail.hpp"
#include "pack_ops.hpp"

// Baseline build of the kernel bodies: four explicit lanes, std::fma for
// every fused step (correctly rounded whether glibc resolves it in software
// or hardware), so results match the AVX2 build bit for bit.

namespace segsites::kernels::detail {

namespace {

struct ScalarPack {
  struct D {
    double v[4];
  };
  struct I {
    std::uint64_t v[4];
  };
  struct M {
    bool v[4];
  };

  static D load(const double* p) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = p[l];
    return r;
  }
  static void store(double* p, D a) {
    for (int l = 0; l < 4; ++l) p[l] = a.v[l];
  }
  static D set1(double x) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = x;
    return r;
  }
  static I set1_i(std::uint64_t x) {
    I r;
    for (int l = 0; l < 4; ++l) r.v[l] = x;
    return r;
  }
  static D add(D a, D b) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] + b.v[l];
    return r;
  }
  static D sub(D a, D b) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] - b.v[l];
    return r;
  }
  static D mul(D a, D b) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] * b.v[l];
    return r;
  }
  static D div(D a, D b) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] / b.v[l];
    return r;
  }
  static D fma(D a, D b, D c) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = std::fma(a.v[l], b.v[l], c.v[l]);
    return r;
  }
  static D floor(D a) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = std::floor(a.v[l]);
    return r;
  }
  static D abs(D a) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = std::fabs(a.v[l]);
    return r;
  }
  static M gt(D a, D b) {
    M r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] > b.v[l];
    return r;
  }
  static M ge(D a, D b) {
    M r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] >= b.v[l];
    return r;
  }
  static D select(M m, D a, D b) {
    D r;
    for (int l = 0; l < 4; ++l) r.v[l] = m.v[l] ? a.v[l] : b.v[l];
    return r;
  }
  static I to_bits(D a) {
    I r;
    std::memcpy(r.v, a.v, sizeof(r.v));
    return r;
  }
  static D from_bits(I a) {
    D r;
    std::memcpy(r.v, a.v, sizeof(r.v));
    return r;
  }
  static I shr52(I a) {
    I r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] >> 52;
    return r;
  }
  static I and_i(I a, I b) {
    I r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] & b.v[l];
    return r;
  }
  static I or_i(I a, I b) {
    I r;
    for (int l = 0; l < 4; ++l) r.v[l] = a.v[l] | b.v[l];
    return r;
  }
};

}  // namespace

namespace scalar {

void log_unit(const double* u, double* out, std::size_t n) {
  log_unit_impl<ScalarPack>(u, out, n);
}

void geometric_accumulate(const double* u, double inv_log_q, double* acc,
                          std::size_t n) {
  geometric_accumulate_impl<ScalarPack>(u, inv_log_q, acc, n);
}

void exp_accumulate(const double* u, double weight, double* acc,
                    std::size_t n) {
  exp_accumulate_impl<ScalarPack>(u, weight, acc, n);
}

CentralSums central_sums(const double* x, std::size_t n, double center) {
  return central_sums_impl<ScalarPack>(x, n, center);
}

}  // namespace scalar

}  // namespace segsites::kernels::detail
