#pragma once

namespace signmat {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "signmat";

}  // namespace signmat
