#include "segsites/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace segsites {

void MutationParams::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("theta must be positive and finite, got " +
                                std::to_string(theta));
  }
  if (n < 2) {
    throw std::invalid_argument("sample size n must be >= 2, got " +
                                std::to_string(n));
  }
}

}  // namespace segsites
