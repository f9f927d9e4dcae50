#pragma once

namespace glassbox {

// Bumped on any change that can alter report bytes; the version string is
// hashed into every compliance report.
inline constexpr const char* kVersion = "1.0.0";

}  // namespace glassbox
