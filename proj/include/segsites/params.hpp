#pragma once

namespace segsites {

// Scaled mutation rate theta (mutations per 2N generations along the tree)
// and sample size n.
struct MutationParams {
  double theta = 1.0;
  int n = 2;

  // Throws std::invalid_argument unless theta > 0, theta finite, n >= 2.
  void validate() const;
};

}  // namespace segsites
