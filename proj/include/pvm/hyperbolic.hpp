#pragma once

// Hyperbolic discounting of the consumer-goods lines: period t is weighted by
// 1 / (1 + k t) instead of r^t. The discounted sum has the closed form
//   M_r = (c p / k) * Phi(a + i p, 1, 1 + 1/k).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pvm/economy.hpp"
#include "pvm/multiplier.hpp"
#include "pvm/numeric/quadrature.hpp"
#include "pvm/numeric/roots.hpp"
#include "pvm/specfun.hpp"

namespace pvm {

struct HyperbolicSpec {
    double k = 0.0;

    static HyperbolicSpec make(double k) {
        if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("hyperbolic k must be finite and > 0");
        return {k};
    }
};

inline double hyperbolic_term(const EconomyParams& e, const HyperbolicSpec& spec, long period) {
    if (period < 1) throw std::invalid_argument("hyperbolic_term: period must be >= 1");
    const double x = line_ratio(e);
    return e.c * e.p * std::pow(x, static_cast<double>(period - 1)) /
           (1.0 + spec.k * static_cast<double>(period));
}

inline MultiplierResult hyperbolic_multiplier(const EconomyParams& e, const HyperbolicSpec& spec,
                                              double epsilon = specfun::kLerchDefaultEpsilon) {
    const double x = line_ratio(e);
    const double scale = e.c * e.p / spec.k;
    if (scale == 0.0) return MultiplierResult::convergent_with(0.0, x);
    if (!(x < 1.0)) return MultiplierResult::divergent_with(x);
    // absolute Lerch tolerance scaled so the product keeps ~epsilon accuracy
    const double phi = specfun::lerch_phi({x, 1.0 + 1.0 / spec.k}, epsilon * std::min(1.0, 1.0 / scale));
    return MultiplierResult::convergent_with(scale * phi, x);
}

struct ShareInterval {
    double lo = 0.0;
    double hi = 1.0;
};

enum class DerivativeSign { Positive, Negative, Mixed };

struct HyperbolicShareOptimum {
    std::vector<double> roots;  // c values where dM_r/dc changes sign
    DerivativeSign sign = DerivativeSign::Mixed;
};

namespace detail {

inline double hyperbolic_value_at_share(EconomyParams e, const HyperbolicSpec& spec, double c) {
    e.c = c;
    const MultiplierResult m = hyperbolic_multiplier(e, spec, 1e-15);
    if (!m.convergent()) throw std::domain_error("hyperbolic multiplier diverges at requested share");
    return *m.value;
}

}  // namespace detail

/// Central finite-difference derivative of the hyperbolic multiplier in c.
/// One-sided near the interval ends so no evaluation leaves [lo, hi].
inline double hyperbolic_share_slope(const EconomyParams& e, const HyperbolicSpec& spec, double c,
                                     const ShareInterval& within = {}, double step = 1e-6) {
    double lo = c - step;
    double hi = c + step;
    if (lo < within.lo) lo = within.lo;
    if (hi > within.hi) hi = within.hi;
    return (detail::hyperbolic_value_at_share(e, spec, hi) -
            detail::hyperbolic_value_at_share(e, spec, lo)) /
           (hi - lo);
}

/// Locates every c in `within` where the hyperbolic multiplier's slope in c
/// changes sign, by scanning a grid of the finite-difference slope and
/// bisecting each sign change. Throws std::domain_error if a + i p >= 1 for
/// any c in the interval (the worst case is the lower end, where i is largest).
inline HyperbolicShareOptimum hyperbolic_share_optimum(const EconomyParams& e, const HyperbolicSpec& spec,
                                                       const ShareInterval& within = {},
                                                       int grid_points = 401) {
    if (!(within.lo >= 0.0 && within.hi <= 1.0 && within.lo < within.hi))
        throw std::invalid_argument("hyperbolic_share_optimum: interval must satisfy 0 <= lo < hi <= 1");
    EconomyParams worst = e;
    worst.c = within.lo;
    if (!(line_ratio(worst) < 1.0))
        throw std::domain_error("hyperbolic_share_optimum: a + i p >= 1 inside the share interval");

    auto slope = [&](double c) { return hyperbolic_share_slope(e, spec, c, within); };
    HyperbolicShareOptimum out;
    bool any_pos = false;
    bool any_neg = false;
    const auto brackets = numeric::scan_sign_changes(
        [&](double c) {
            const double s = slope(c);
            (s > 0.0 ? any_pos : any_neg) = true;
            return s;
        },
        within.lo, within.hi, grid_points);
    for (const auto& b : brackets) {
        out.roots.push_back(b.lo == b.hi ? b.lo : numeric::bisect(slope, b.lo, b.hi, 1e-12));
    }
    if (out.roots.empty()) {
        out.sign = any_neg && !any_pos ? DerivativeSign::Negative
                   : any_pos && !any_neg ? DerivativeSign::Positive
                                         : DerivativeSign::Mixed;
    }
    return out;
}

struct PartialIntegral {
    double horizon = 0.0;
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Continuous-time counterpart of the hyperbolic sum: the integrand
/// c p x^{t-1} / (1 + k t), its partial integrals over [0, T], and the
/// candidate limit from the Ei antiderivative
///   F(t) = (c p / k) x^{-(k+1)/k} Ei((k t + 1) ln x / k),
/// i.e. F(inf) - F(0) = -(c p / k) x^{-(k+1)/k} Ei(ln x / k).
/// Nothing here decides whether the integral converges; callers compare.
struct ContinuousTimeReport {
    double growth_ratio = 0.0;
    double integrand_at_zero = 0.0;
    std::vector<PartialIntegral> partials;
    double candidate_limit = 0.0;
};

inline double continuous_integrand(const EconomyParams& e, const HyperbolicSpec& spec, double t) {
    const double x = line_ratio(e);
    return e.c * e.p * std::pow(x, t - 1.0) / (1.0 + spec.k * t);
}

inline double ei_candidate_limit(const EconomyParams& e, const HyperbolicSpec& spec) {
    const double x = line_ratio(e);
    const double k = spec.k;
    return -(e.c * e.p / k) * std::pow(x, -(k + 1.0) / k) * specfun::exp_integral_ei(std::log(x) / k);
}

inline ContinuousTimeReport continuous_time_adjudicator(const EconomyParams& e, const HyperbolicSpec& spec,
                                                        const std::vector<double>& horizons,
                                                        double panel_tol = 1e-10) {
    const double x = line_ratio(e);
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error("continuous_time_adjudicator: a + i p must lie in (0, 1)");
    ContinuousTimeReport out;
    out.growth_ratio = x;
    out.integrand_at_zero = continuous_integrand(e, spec, 0.0);
    auto f = [&](double t) { return continuous_integrand(e, spec, t); };
    numeric::QuadratureOptions opts;
    opts.abs_tol = panel_tol;
    for (double T : horizons) {
        if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("continuous_time_adjudicator: horizons must be finite and >= 0");
        // unit-length panels keep the decaying integrand well resolved
        numeric::CompensatedSum total;
        double err = 0.0;
        for (double t0 = 0.0; t0 < T; t0 += 1.0) {
            const auto q = numeric::integrate(f, t0, std::min(T, t0 + 1.0), opts);
            total += q.value;
            err += q.error;
        }
        out.partials.push_back({T, total.value(), err});
    }
    out.candidate_limit = ei_candidate_limit(e, spec);
    return out;
}

}  // namespace pvm
