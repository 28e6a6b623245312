#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pvm/numeric/summation.hpp"

namespace pvm::specfun {

inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;
inline constexpr double kLerchDefaultEpsilon = 1e-12;
inline constexpr double kEiDefaultEpsilon = 1e-10;

struct LerchArgs {
    double z = 0.0;
    double alpha = 1.0;  // s is fixed at 1
};

/// Lerch transcendent at s = 1:  Phi(z, 1, alpha) = sum_{m>=0} z^m / (m + alpha).
///
/// Direct summation; after M terms the remainder is bounded by
/// z^M / ((M + alpha)(1 - z)), and summation stops once that is <= epsilon.
inline double lerch_phi(const LerchArgs& args, double epsilon = kLerchDefaultEpsilon) {
    const double z = args.z;
    const double alpha = args.alpha;
    if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("lerch_phi: z must lie in (0, 1)");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("lerch_phi: alpha must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("lerch_phi: epsilon must be > 0");

    numeric::CompensatedSum sum;
    double zm = 1.0;
    for (long m = 0;; ++m) {
        sum += zm / (static_cast<double>(m) + alpha);
        zm *= z;
        const double tail = zm / ((static_cast<double>(m + 1) + alpha) * (1.0 - z));
        if (tail <= epsilon) break;
    }
    return sum.value();
}

namespace detail {

// Ei(x) = gamma + ln|x| + sum_{k>=1} x^k / (k k!).
// Only used where the terms do not cancel badly: |x| <= 1 or x > 0.
inline double ei_power_series(double x, double epsilon) {
    numeric::CompensatedSum sum(kEulerGamma);
    sum += std::log(std::abs(x));
    double term = 1.0;  // x^k / k!
    for (int k = 1; k < 1000; ++k) {
        term *= x / k;
        const double contrib = term / k;
        sum += contrib;
        if (std::abs(contrib) <= 0.25 * epsilon * std::abs(sum.value()) && k > std::abs(x)) break;
    }
    return sum.value();
}

// E1(y) for y > 1 by the modified Lentz evaluation of
//   E1(y) = e^{-y} / (y + 1 - 1/(y + 3 - 4/(y + 5 - ...))).
inline double e1_continued_fraction(double y, double epsilon) {
    constexpr double tiny = 1e-300;
    double b = y + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) <= 0.1 * epsilon) break;
    }
    return h * std::exp(-y);
}

}  // namespace detail

/// Exponential integral Ei(x) = PV int_{-inf}^{x} e^t / t dt, x != 0.
/// For x < -1 uses Ei(x) = -E1(-x) with a continued fraction; otherwise the
/// power series.
inline double exp_integral_ei(double x, double epsilon = kEiDefaultEpsilon) {
    if (x == 0.0) throw std::invalid_argument("exp_integral_ei: logarithmic singularity at x = 0");
    if (std::isnan(x)) throw std::invalid_argument("exp_integral_ei: x is NaN");
    if (!(epsilon > 0.0)) throw std::invalid_argument("exp_integral_ei: epsilon must be > 0");
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    if (x < -1.0) {
        if (x < -745.0) return -0.0;  // e^x underflows
        return -detail::e1_continued_fraction(-x, epsilon);
    }
    if (x > 709.0) return std::numeric_limits<double>::infinity();
    return detail::ei_power_series(x, epsilon);
}

}  // namespace pvm::specfun
