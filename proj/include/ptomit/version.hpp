#pragma once

namespace ptomit
{

inline constexpr const char* kVersion = "0.1.0";

} // namespace ptomit
