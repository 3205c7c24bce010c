#pragma once

namespace fcms {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fcms
