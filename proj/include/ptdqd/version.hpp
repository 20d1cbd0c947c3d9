#pragma once

#define PTDQD_VERSION_MAJOR 1
#define PTDQD_VERSION_MINOR 0
#define PTDQD_VERSION_PATCH 0
#define PTDQD_VERSION "1.0.0"

namespace ptdqd {

inline const char* version() { return PTDQD_VERSION; }

}  // namespace ptdqd
