#pragma once

namespace polywave {

inline constexpr const char* kVersion = "0.1.0";

} // namespace polywave
