#include "segsites/rng.hpp"

namespace segsites::rng {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline std::uint64_t mulhi64(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) >> 64);
}

}  // namespace

Block philox4x64(Block c, const Key& key) {
  std::uint64_t k0 = key[0];
  std::uint64_t k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t hi0 = mulhi64(kMult0, c[0]);
    const std::uint64_t lo0 = kMult0 * c[0];
    const std::uint64_t hi1 = mulhi64(kMult1, c[2]);
    const std::uint64_t lo1 = kMult1 * c[2];
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

void fill_unit_lane(const Key& key, std::uint64_t var, std::uint64_t stage,
                    std::uint64_t rep_start, std::size_t count, double* out) {
  // rep_start % 4 == 0: each block covers replicates 4b .. 4b+3.
  std::uint64_t block_index = rep_start >> 2;
  std::size_t i = 0;
  while (i < count) {
    const Block b = philox4x64({block_index, var, 0, stage}, key);
    for (int lane = 0; lane < 4 && i < count; ++lane, ++i) {
      out[i] = to_unit(b[static_cast<std::size_t>(lane)]);
    }
    ++block_index;
  }
}

void UniformStream::refill() {
  buf_ = philox4x64(counter_, key_);
  ++counter_[2];
  pos_ = 0;
}

}  // namespace segsites::rng
