#pragma once

#define CRITWAVE_VERSION_STRING "1.0.0"

namespace critwave {
inline const char* version() { return CRITWAVE_VERSION_STRING; }
}  // namespace critwave
