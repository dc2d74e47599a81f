#pragma once

namespace segsites {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace segsites
