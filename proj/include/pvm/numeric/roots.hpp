#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pvm::numeric {

struct Bracket {
    double lo;
    double hi;
};

/// Bisection on a sign-changing bracket. Stops when the bracket is narrower
/// than `x_tol` or f hits zero exactly. Throws if f(lo), f(hi) share a sign.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol = 1e-12, int max_iter = 200) {
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (std::signbit(f_lo) == std::signbit(f_hi)) {
        throw std::invalid_argument("bisect: endpoints do not bracket a root");
    }
    for (int it = 0; it < max_iter && std::abs(hi - lo) > x_tol; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

/// Grows [lo, hi] geometrically away from `lo` until f changes sign.
/// `lo` must stay fixed (e.g. a domain edge); returns nullopt after `max_grow` doublings.
template <class F>
std::optional<Bracket> expand_upward(F&& f, double lo, double hi, int max_grow = 200) {
    const double f_lo = f(lo);
    for (int g = 0; g < max_grow; ++g) {
        const double f_hi = f(hi);
        if (std::signbit(f_lo) != std::signbit(f_hi) || f_hi == 0.0) return Bracket{lo, hi};
        hi = lo + 2.0 * (hi - lo);
    }
    return std::nullopt;
}

/// Scans `grid_points` equally spaced samples of f on [lo, hi] and returns
/// every sub-interval whose end values differ in sign.
template <class F>
std::vector<Bracket> scan_sign_changes(F&& f, double lo, double hi, int grid_points) {
    std::vector<Bracket> out;
    if (grid_points < 2) throw std::invalid_argument("scan_sign_changes: need >= 2 points");
    double x_prev = lo;
    double f_prev = f(lo);
    for (int j = 1; j < grid_points; ++j) {
        const double x = (j == grid_points - 1) ? hi : lo + (hi - lo) * j / (grid_points - 1);
        const double fx = f(x);
        if (f_prev != 0.0 && fx != 0.0 && std::signbit(f_prev) != std::signbit(fx)) {
            out.push_back({x_prev, x});
        } else if (fx == 0.0 && j != grid_points - 1) {
            out.push_back({x, x});
        }
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

}  // namespace pvm::numeric
