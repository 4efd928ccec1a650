#pragma once

namespace synq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace synq
