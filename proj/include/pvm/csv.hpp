#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <system_error>

#include "pvm/dynamics.hpp"

namespace pvm::csv {

/// Shortest-safe round-trip text for a double: 17 significant digits.
inline std::string number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

inline std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

inline constexpr const char* kTrajectoryHeader = "t,K,p,R,c,M_r,status";

/// Trajectory rows; M_r is empty and status Divergent where the multiplier
/// does not converge.
inline std::string trajectory(const Trajectory& tr) {
    std::string out = kTrajectoryHeader;
    out += '\n';
    for (const auto& s : tr.samples) {
        out += number(s.t) + ',' + number(s.K) + ',' + number(s.p) + ',' + number(s.R) + ',' + number(s.c) + ',' +
               number(s.Mr) + ',' + (s.Mr ? "Convergent" : "Divergent") + '\n';
    }
    return out;
}

}  // namespace pvm::csv
