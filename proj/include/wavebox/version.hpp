#pragma once

namespace wavebox {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wavebox
