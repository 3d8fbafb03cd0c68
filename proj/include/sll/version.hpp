#pragma once

namespace sll {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sll
