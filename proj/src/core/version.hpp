#pragma once

namespace hjbtk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hjbtk
