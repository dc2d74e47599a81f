#pragma once

#include <stdexcept>
#include <string>

namespace segsites {

// Requested size exceeds a documented table or enumeration limit.
class capacity_error : public std::length_error {
 public:
  explicit capacity_error(const std::string& what) : std::length_error(what) {}
};

// Two independent formulas for the same quantity disagreed beyond their
// documented tolerance. Signals a bug in the library, not bad input.
class integrity_error : public std::logic_error {
 public:
  explicit integrity_error(const std::string& what) : std::logic_error(what) {}
};

// A truncated series failed to converge before its hard cap.
class truncation_error : public std::runtime_error {
 public:
  explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace segsites
