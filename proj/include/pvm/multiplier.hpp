#pragma once

// Discrete-time consumer-goods multipliers and the decisions built on them.
//
// One unit of capital split c : i between consumer-goods and producer-goods
// production yields a consumer-goods line c p x^{t-1} in period t, with
// x = a + i p. Summing the lines gives
//
//   M   = c p / (1 - x)                     (undiscounted)
//   M_r = c p r / (1 - r x)                 (discounted at r = 1/(1+R))
//
// Multiplying M_r through by (1 + R) gives M_r = c p / d with
// d = R + n - p + c p. That form is used for evaluation: it returns exactly 1
// when p = R + n and avoids the cancellation in 1 - r x.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pvm/economy.hpp"

namespace pvm {

/// Undiscounted growth ratio a + i p of the consumer-goods lines.
inline double line_ratio(const EconomyParams& e) { return e.a() + e.i() * e.p; }

/// Denominator d = R + n - p + c p of the present-value multiplier.
/// Convergence of M_r is equivalent to d > 0.
inline double present_denominator(const EconomyParams& e) {
    return (e.R + e.n - e.p) + e.c * e.p;
}

inline MultiplierResult future_multiplier(const EconomyParams& e) {
    const double ratio = line_ratio(e);
    const double denom = e.n - e.i() * e.p;  // == 1 - (a + i p)
    if (e.c == 0.0) return MultiplierResult::convergent_with(0.0, ratio);  // every line is zero
    if (!(ratio < 1.0) || !(denom > 0.0)) return MultiplierResult::divergent_with(std::max(ratio, 1.0));
    return MultiplierResult::convergent_with(e.c * e.p / denom, ratio);
}

inline MultiplierResult present_multiplier(const EconomyParams& e) {
    const double ratio = e.r() * line_ratio(e);
    const double denom = present_denominator(e);
    if (e.c == 0.0) return MultiplierResult::convergent_with(0.0, ratio);
    if (!(ratio < 1.0) || !(denom > 0.0)) return MultiplierResult::divergent_with(std::max(ratio, 1.0));
    return MultiplierResult::convergent_with(e.c * e.p / denom, ratio);
}

/// p - R - n; zero at capital-market equilibrium.
inline double equilibrium_gap(const EconomyParams& e) { return e.p - e.R - e.n; }

/// dM_r/dc = p r (1 - r a - r p) / D^2 with D = 1 - r a - r p + r p c,
/// evaluated as p (R + n - p) / d^2. Vanishes exactly when p = R + n.
inline double share_derivative(const EconomyParams& e) {
    const double d = present_denominator(e);
    if (!(d > 0.0) || !(e.r() * line_ratio(e) < 1.0))
        throw std::domain_error("share_derivative: present multiplier diverges");
    return e.p * (e.R + e.n - e.p) / (d * d);
}

/// Corner/interior classification of the share c maximising M_r on [0, 1].
/// The discriminant 1 - r a - r p equals (R + n - p) / (1 + R); Interior is
/// reported when |p - R - n| <= tol.
inline ShareOptimum optimal_share(const EconomyParams& e, double tol = kDefaultEqualityTolerance) {
    const double gap = equilibrium_gap(e);
    ShareOptimum out;
    out.discriminant = -gap / (1.0 + e.R);
    if (std::abs(gap) <= tol) {
        out.regime = ShareRegime::Interior;
    } else if (gap > 0.0) {
        out.regime = ShareRegime::CornerZero;
    } else {
        out.regime = ShareRegime::CornerOne;
    }
    return out;
}

/// Linear-utility choice max C + M_r K s.t. W = C + K.
inline ChoiceAllocation consumer_choice(const ChoiceProblem& problem,
                                        double tol = kDefaultEqualityTolerance) {
    if (!(problem.wealth >= 0.0)) throw std::invalid_argument("consumer_choice: wealth must be >= 0");
    const double w = problem.wealth;
    if (std::abs(problem.multiplier - 1.0) <= tol) return {ChoiceKind::Indifferent, w, 0.0, w};
    if (problem.multiplier > 1.0) return {ChoiceKind::InvestAll, w, w, w};
    return {ChoiceKind::ConsumeAll, w, 0.0, 0.0};
}

}  // namespace pvm
