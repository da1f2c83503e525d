#pragma once

namespace aniso {

inline constexpr const char* kToolName = "aniso";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace aniso
