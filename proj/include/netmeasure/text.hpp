#pragma once

#include <cstdio>
#include <string>

namespace netmeasure {

/// Locale-independent, byte-stable rendering used for every CSV/SVG/trace number.
inline std::string format_number(double value, int significant = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, value);
    return buf;
}

}  // namespace netmeasure
