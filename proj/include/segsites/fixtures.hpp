#pragma once

#include <cstdint>

namespace segsites::fixtures {

// Seed for every fixed-seed Monte Carlo suite (verification full level and
// the acceptance runner). Chosen before any threshold below was recorded.
inline constexpr std::uint64_t kMcSeed = 20260825;

// Kolmogorov-Smirnov budget for the CLT diagnostic at theta = 1, n = 1000,
// R = 10^6. S_n sits on an integer lattice with sd sigma ~ 3.0215, so the
// distance against the continuous normal CDF is dominated by deterministic
// structure, not Monte Carlo noise (which is ~ 1/sqrt(R) ~ 0.001): the
// half-step of the lattice contributes phi(0)/(2 sigma) ~ 0.0660 and the
// Edgeworth skewness term gamma_1 phi(0)/6 ~ 0.0357 on top. Calibration
// control run at kMcSeed measured 0.1002675; reproduce with
//   segsites asymptotics --clt-check --theta 1 --n 1000
//     --replicates 1000000 --seed 20260825
// (one line), which also reports sample skewness 0.53725 vs analytic
// 0.53736 and excess kurtosis 0.47768 vs analytic 0.47896. The
// budget is that measurement plus ~5% headroom; see README for discussion.
inline constexpr double kCltKsBudget = 0.105;

// Two-sample chi-square comparisons between simulation methods pass when
// the p-value exceeds this; run with kMcSeed they are deterministic.
inline constexpr double kChiSquareMinP = 1e-4;

}  // namespace segsites::fixtures
