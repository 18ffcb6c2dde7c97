#pragma once

namespace mtcoal {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mtcoal
