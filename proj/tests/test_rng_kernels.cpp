#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "segsites/kernels.hpp"
#include "segsites/numeric.hpp"
#include "segsites/rng.hpp"

using namespace segsites;
using rng::Block;
using rng::Key;

TEST_CASE("philox4x64-10 known-answer vectors") {
  const std::uint64_t ff = ~0ull;
  // Zero and all-ones inputs are the standard published vectors for this
  // generator; the remaining two pin arbitrary mixed inputs and the
  // counter+1 block that a popular numpy generator emits first at seed 0.
  CHECK((rng::philox4x64({0, 0, 0, 0}, {0, 0}) ==
         Block{0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull,
               0xd7e772cee186176bull, 0x7e68b68aec7ba23bull}));
  CHECK((rng::philox4x64({ff, ff, ff, ff}, {ff, ff}) ==
         Block{0x87b092c3013fe90bull, 0x438c3c67be8d0224ull,
               0x9cc7d7c69cd777b6ull, 0xa09caebf594f0ba0ull}));
  CHECK((rng::philox4x64({0x0123456789abcdf0ull, 0xfedcba9876543210ull,
                          0xdeadbeefcafebabeull, 0x0f1e2d3c4b5a6978ull},
                         {0x243f6a8885a308d3ull, 0x13198a2e03707344ull}) ==
         Block{0x26719e0828603219ull, 0x99fcc82ffcc50a9bull,
               0x62244320b19441e1ull, 0x8b24ce62f448e823ull}));
  CHECK((rng::philox4x64({1, 0, 0, 0}, {0, 0}) ==
         Block{0x02f4ba6408e4d89bull, 0x3dd62b0b9ca8c5b2ull,
               0x1c8667a55d902e79ull, 0x907d7a052fd5b4dcull}));
}

TEST_CASE("to_unit maps into the open interval with full precision") {
  CHECK(rng::to_unit(0) == std::ldexp(1.0, -53));
  CHECK(rng::to_unit(~0ull) == 1.0 - std::ldexp(1.0, -53));
  CHECK(rng::to_unit(~0ull) < 1.0);
  CHECK(rng::to_unit(1ull << 12) == std::ldexp(1.5, -52));
  for (std::uint64_t x : {0ull, 1ull, 0x8000000000000000ull, ~0ull}) {
    const double u = rng::to_unit(x);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(std::isnormal(u));
  }
}

TEST_CASE("fill_unit_lane matches direct block evaluation") {
  const Key key{12345, 3};
  std::vector<double> out(11);
  rng::fill_unit_lane(key, 7, 2, 8, 11, out.data());
  std::size_t i = 0;
  for (std::uint64_t block = 2; i < out.size(); ++block) {
    const Block b = rng::philox4x64({block, 7, 0, 2}, key);
    for (int lane = 0; lane < 4 && i < out.size(); ++lane, ++i) {
      CHECK(out[i] == rng::to_unit(b[static_cast<std::size_t>(lane)]));
    }
  }
  // Restarting mid-stream at a lane boundary reproduces the same values.
  std::vector<double> tail(7);
  rng::fill_unit_lane(key, 7, 2, 12, 7, tail.data());
  for (std::size_t j = 0; j < tail.size(); ++j) {
    CHECK(tail[j] == out[j + 4]);
  }
}

TEST_CASE("uniform stream is deterministic and disjoint by coordinates") {
  rng::UniformStream a({42, 1}, 17, 3, 1);
  rng::UniformStream b({42, 1}, 17, 3, 1);
  for (int i = 0; i < 40; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  // Word 2 counts blocks: the stream's values are exactly the philox
  // blocks at {17, 3, 0.., 1}.
  rng::UniformStream c({42, 1}, 17, 3, 1);
  for (std::uint64_t block = 0; block < 3; ++block) {
    const Block direct = rng::philox4x64({17, 3, block, 1}, {42, 1});
    for (std::size_t w = 0; w < 4; ++w) {
      CHECK(c.next_u64() == direct[w]);
    }
  }
  rng::UniformStream d({42, 1}, 18, 3, 1);
  CHECK(d.next_u64() != rng::UniformStream({42, 1}, 17, 3, 1).next_u64());
  rng::UniformStream e({42, 1}, 17, 3, 1);
  const double u = e.next_unit();
  CHECK(u > 0.0);
  CHECK(u < 1.0);
}

namespace {

std::vector<double> test_uniforms(std::size_t n) {
  std::vector<double> u(n);
  rng::fill_unit_lane({987654321, 0}, 1, 0, 0, n, u.data());
  return u;
}

}  // namespace

TEST_CASE("log kernel tracks libm on (0,1)") {
  const auto u = test_uniforms(4096);
  std::vector<double> out(u.size());
  kernels::log_unit(u.data(), out.data(), u.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    worst = std::max(worst, relative_difference(out[i], std::log(u[i])));
  }
  CHECK(worst <= 1e-14);
  // Hard points: smallest and largest values to_unit can produce.
  const double edges[4] = {std::ldexp(1.0, -54), 1.0 - std::ldexp(1.0, -53),
                           0.5, std::ldexp(1.0, -54)};
  double edge_out[4];
  kernels::log_unit(edges, edge_out, 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(relative_difference(edge_out[i], std::log(edges[i])) <= 1e-14);
  }
}

TEST_CASE("geometric kernel floors scaled logs") {
  // q = 1/2: floor(log(u)/log(q)). Interior points only; ratios near exact
  // integers depend on the final ulp and are pinned by the simulator tests
  // instead.
  const double u[4] = {0.6, 0.3, 0.1, 0.01};
  double acc[4] = {10.0, 0.0, 0.0, 0.0};
  kernels::geometric_accumulate(u, 1.0 / std::log(0.5), acc, 4);
  CHECK(acc[0] == 10.0);  // 0.736...
  CHECK(acc[1] == 1.0);   // 1.736...
  CHECK(acc[2] == 3.0);   // 3.321...
  CHECK(acc[3] == 6.0);   // 6.643...
}

TEST_CASE("exponential kernel accumulates weighted -log") {
  const auto u = test_uniforms(256);
  std::vector<double> acc(u.size(), 0.25);
  kernels::exp_accumulate(u.data(), 1.5, acc.data(), u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(relative_difference(acc[i], 0.25 + 1.5 * -std::log(u[i])) <= 1e-13);
  }
}

TEST_CASE("central sums match a long-double reference") {
  const auto u = test_uniforms(8192);
  std::vector<double> x(u.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 40.0 * u[i] - 3.0;  // spread over [-3, 37]
  }
  const double center = 20.0;  // clearly off-mean so d1 is far from zero
  const auto sums = kernels::central_sums(x.data(), x.size(), center);
  long double d1 = 0, d2 = 0, d3 = 0, d4 = 0;
  for (double v : x) {
    const long double d = static_cast<long double>(v) - center;
    d1 += d;
    d2 += d * d;
    d3 += d * d * d;
    d4 += d * d * d * d;
  }
  CHECK(relative_difference(sums.d1, static_cast<double>(d1)) <= 1e-11);
  CHECK(relative_difference(sums.d2, static_cast<double>(d2)) <= 1e-13);
  CHECK(relative_difference(sums.d3, static_cast<double>(d3)) <= 1e-13);
  CHECK(relative_difference(sums.d4, static_cast<double>(d4)) <= 1e-13);
}

TEST_CASE("kernel dispatch contract") {
  CHECK(kernels::isa_supported(kernels::Isa::scalar));
  CHECK(std::strcmp(kernels::isa_name(kernels::Isa::scalar), "scalar") == 0);
  CHECK(std::strcmp(kernels::isa_name(kernels::Isa::avx2), "avx2") == 0);
  const double u[5] = {0.5, 0.5, 0.5, 0.5, 0.5};
  double out[5];
  CHECK_THROWS_AS(kernels::log_unit(u, out, 5), std::invalid_argument);
}

TEST_CASE("scalar and avx2 kernels are bit-identical") {
  if (!kernels::isa_supported(kernels::Isa::avx2)) {
    MESSAGE("avx2 not available on this machine; scalar-only build");
    return;
  }
  const auto u = test_uniforms(100000);
  const kernels::Isa saved = kernels::active_isa();

  std::vector<double> log_a(u.size()), log_b(u.size());
  std::vector<double> geo_a(u.size(), 0.0), geo_b(u.size(), 0.0);
  std::vector<double> exp_a(u.size(), 0.0), exp_b(u.size(), 0.0);

  kernels::force_isa(kernels::Isa::scalar);
  kernels::log_unit(u.data(), log_a.data(), u.size());
  kernels::geometric_accumulate(u.data(), 1.0 / std::log(0.37), geo_a.data(),
                                u.size());
  kernels::exp_accumulate(u.data(), 2.25, exp_a.data(), u.size());
  const auto cs_a = kernels::central_sums(u.data(), u.size(), 0.25);

  kernels::force_isa(kernels::Isa::avx2);
  kernels::log_unit(u.data(), log_b.data(), u.size());
  kernels::geometric_accumulate(u.data(), 1.0 / std::log(0.37), geo_b.data(),
                                u.size());
  kernels::exp_accumulate(u.data(), 2.25, exp_b.data(), u.size());
  const auto cs_b = kernels::central_sums(u.data(), u.size(), 0.25);

  kernels::force_isa(saved);

  CHECK(std::memcmp(log_a.data(), log_b.data(),
                    log_a.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(geo_a.data(), geo_b.data(),
                    geo_a.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(exp_a.data(), exp_b.data(),
                    exp_a.size() * sizeof(double)) == 0);
  CHECK(cs_a.d1 == cs_b.d1);
  CHECK(cs_a.d2 == cs_b.d2);
  CHECK(cs_a.d3 == cs_b.d3);
  CHECK(cs_a.d4 == cs_b.d4);
}
