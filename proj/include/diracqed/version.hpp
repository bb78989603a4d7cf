#pragma once

namespace diracqed {

inline constexpr const char* version = "0.1.0";

} // namespace diracqed
