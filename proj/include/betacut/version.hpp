#pragma once

namespace betacut {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace betacut
