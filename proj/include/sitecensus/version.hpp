#pragma once

namespace sitecensus {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace sitecensus
