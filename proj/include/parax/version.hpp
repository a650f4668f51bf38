#pragma once

namespace parax {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace parax
