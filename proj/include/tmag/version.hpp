#pragma once

namespace tmag {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tmag
