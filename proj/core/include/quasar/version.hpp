#pragma once

namespace quasar {

inline constexpr const char* kVersion = "0.1.0";

} // namespace quasar
