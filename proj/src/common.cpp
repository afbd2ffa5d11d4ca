#include "scf/common.hpp"

#include <cstdio>

namespace scf::num {

std::string format10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace scf::num
