#ifndef SPINSIM_SRC_FORMAT_HPP
#define SPINSIM_SRC_FORMAT_HPP

#include <charconv>
#include <string>

namespace spinsim::detail {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace spinsim::detail

#endif
