#pragma once

namespace arlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace arlab
