#pragma once

namespace fmd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fmd
