#pragma once

namespace gn {

inline constexpr const char* kVersion = "0.1.0";

} // namespace gn
