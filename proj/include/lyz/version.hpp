#pragma once

namespace lyz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lyz
