#pragma once

namespace einsel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace einsel
