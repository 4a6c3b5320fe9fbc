#pragma once

namespace bqsos {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bqsos
