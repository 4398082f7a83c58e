#pragma once

namespace lifecast {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lifecast
