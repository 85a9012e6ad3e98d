#pragma once

namespace mmf {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace mmf
