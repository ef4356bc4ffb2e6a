#pragma once

namespace ibrisk {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ibrisk
