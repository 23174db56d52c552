#pragma once

namespace dlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dlab
