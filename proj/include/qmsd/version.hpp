#pragma once

namespace qmsd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qmsd
