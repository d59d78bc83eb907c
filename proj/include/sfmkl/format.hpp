#pragma once

#include <cstdio>
#include <string>

namespace sfmkl {

    /// Shortest "%.9g" rendering used by every CSV and JSON writer.
    inline std::string
    FormatDouble(double value) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", value);
        return buf;
    }

}  // namespace sfmkl
