#pragma once

namespace cpmg {

inline constexpr const char* kToolName = "cpmgsim";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace cpmg
