#pragma once

namespace polariton {

inline constexpr const char* kCodeVersion = "0.1.0";

}  // namespace polariton
