#pragma once

#include <cstdio>
#include <string>

namespace poseinv {

/// %.17g: shortest form that still round-trips a double exactly.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace poseinv
