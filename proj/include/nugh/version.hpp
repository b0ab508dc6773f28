#pragma once

namespace nugh {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nugh
