#pragma once

namespace dimerchain {

inline constexpr const char* kVersion = "0.1.0";

} // namespace dimerchain
