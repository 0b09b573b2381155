#pragma once

namespace gravlam {

inline constexpr const char* version = "0.1.0";

}  // namespace gravlam
