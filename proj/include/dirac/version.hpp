#pragma once

namespace dirac {

inline constexpr const char* kToolName = "dirac-entangle";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace dirac
