#pragma once

namespace crackcell {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace crackcell
