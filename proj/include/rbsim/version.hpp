#pragma once

namespace rbsim {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace rbsim
