#include <stdexcept>
#include <string>

#include "kernels_detail.hpp"
#include "segsites/kernels.hpp"

namespace segsites::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SEGSITES_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa& active_slot() {
  static Isa active = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return active;
}

void check_width(std::size_t n) {
  if (n % kLaneWidth != 0) {
    throw std::invalid_argument("kernel length must be a multiple of 4, got " +
                                std::to_string(n));
  }
}

}  // namespace

Isa active_isa() { return active_slot(); }

bool isa_supported(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument(std::string(isa_name(isa)) +
                                " not supported on this CPU");
  }
  active_slot() = isa;
}

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void log_unit(const double* u, double* out, std::size_t n) {
  check_width(n);
#if defined(SEGSITES_HAVE_AVX2)
  if (active_slot() == Isa::avx2) {
    detail::avx2::log_unit(u, out, n);
    return;
  }
#endif
  detail::scalar::log_unit(u, out, n);
}

void geometric_accumulate(const double* u, double inv_log_q, double* acc,
                          std::size_t n) {
  check_width(n);
#if defined(SEGSITES_HAVE_AVX2)
  if (active_slot() == Isa::avx2) {
    detail::avx2::geometric_accumulate(u, inv_log_q, acc, n);
    return;
  }
#endif
  detail::scalar::geometric_accumulate(u, inv_log_q, acc, n);
}

void exp_accumulate(const double* u, double weight, double* acc,
                    std::size_t n) {
  check_width(n);
#if defined(SEGSITES_HAVE_AVX2)
  if (active_slot() == Isa::avx2) {
    detail::avx2::exp_accumulate(u, weight, acc, n);
    return;
  }
#endif
  detail::scalar::exp_accumulate(u, weight, acc, n);
}

CentralSums central_sums(const double* x, std::size_t n, double center) {
  check_width(n);
#if defined(SEGSITES_HAVE_AVX2)
  if (active_slot() == Isa::avx2) {
    return detail::avx2::central_sums(x, n, center);
  }
#endif
  return detail::scalar::central_sums(x, n, center);
}

}  // namespace segsites::kernels
