#pragma once

#include <functional>
#include <string>
#include <vector>

namespace segsites::verify {

// fast: every non-Monte-Carlo identity (dual cumulant formulas, polylog
// closed vs series, Stirling recurrence and partition counts, pmf/pgf
// consistency, harmonic/zeta ties); seconds, not minutes.
// full: fast plus the R = 10^6 Monte Carlo suites (moment reproduction,
// pmf total variation, cross-method agreement, Gamma-Poisson mixture vs
// negative binomial, CLT distance against the calibrated fixture).
enum class Level { fast, full };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs the selected suite; on_result (if set) streams each result as it
// completes. A check that throws is reported as failed with the exception
// text, never skipped. A non-empty `only` restricts the run to the named
// checks (the acceptance suite uses this to share implementations);
// unknown names throw std::invalid_argument.
std::vector<CheckResult> run_checks(
    Level level,
    const std::function<void(const CheckResult&)>& on_result = nullptr,
    const std::vector<std::string>& only = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace segsites::verify
