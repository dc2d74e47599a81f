#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace segsites::rng {

// Philox4x64-10 counter-based generator (Salmon et al. constants, ten
// rounds). A block is a pure function of (counter, key), so any consumer can
// be reproduced in isolation from its counter coordinates; there is no
// sequential state to share or lock. Output is frozen by known-answer tests
// in tests/test_rng_kernels.cpp; changing it invalidates every recorded
// simulation fixture.

using Block = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

Block philox4x64(Block counter, const Key& key);

// Map a word to the open interval (0, 1): ((x >> 12) + 0.5) * 2^-52.
// All three steps are exact in double (the 52-bit integer, the half offset,
// and the power-of-two scale), so the result ranges over the midpoints
// 2^-53 .. 1 - 2^-53 and log(u) and log(1 - u) stay finite. Keeping 53
// mantissa bits instead would make the top value round to exactly 1.0.
inline double to_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

// One uniform per replicate for a fixed "variable" coordinate, e.g. the
// level index k of a coalescent. Replicate r reads lane (r & 3) of the block
// with counter {r >> 2, var, 0, stage}. rep_start must be a multiple of 4 so
// chunked and unchunked generation agree.
void fill_unit_lane(const Key& key, std::uint64_t var, std::uint64_t stage,
                    std::uint64_t rep_start, std::size_t count, double* out);

// Sequential word stream at fixed (word0, word1, word3); word2 counts
// blocks. Used by samplers whose uniform consumption is data-dependent
// (e.g. Poisson): each (replicate, variable) pair draws from its own stream,
// so consumption in one replicate never shifts another.
class UniformStream {
 public:
  UniformStream(const Key& key, std::uint64_t word0, std::uint64_t word1,
                std::uint64_t word3)
      : key_(key), counter_{word0, word1, 0, word3} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  double next_unit() { return to_unit(next_u64()); }

 private:
  void refill();

  Key key_;
  Block counter_;
  Block buf_{};
  int pos_ = 4;
};

}  // namespace segsites::rng
