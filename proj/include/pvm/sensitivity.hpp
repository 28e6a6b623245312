#pragma once

// First-order sensitivity of the present-value multiplier.
//
// With d = R + n - p + c p (so M_r = c p / d):
//   dM_r/dp = c (R + n) / d^2       == c r (1 - r a) / D^2
//   dM_r/dR = -c p / d^2            == -c p / ((1 + R)^2 D^2)
//   dM_r/dc = p (R + n - p) / d^2   == p r (1 - r a - r p) / D^2
// where D = 1 - r a - r p + r p c = d / (1 + R).

#include <cmath>
#include <stdexcept>

#include "pvm/economy.hpp"
#include "pvm/multiplier.hpp"

namespace pvm {

struct Partials {
    double dMr_dp = 0.0;
    double dMr_dR = 0.0;
    double dMr_dc = 0.0;
};

/// Time rates of the two channels driving the multiplier.
struct ChannelRates {
    double dp_dt = 0.0;
    double dR_dt = 0.0;
};

/// Responses of the share c to p and R (caller supplied; not modeled).
struct ShareChannel {
    double dc_dp = 0.0;
    double dc_dR = 0.0;
};

struct SensitivityReport {
    Partials partials;
    double delta_Mr_first_order = 0.0;
};

inline Partials partials(const EconomyParams& e) {
    const double d = present_denominator(e);
    if (!(d > 0.0) || !(e.r() * line_ratio(e) < 1.0))
        throw std::domain_error("partials: present multiplier diverges");
    const double d2 = d * d;
    return {e.c * (e.R + e.n) / d2, -e.c * e.p / d2, e.p * (e.R + e.n - e.p) / d2};
}

/// Two-channel first-order change of M_r over dt.
inline double delta_Mr(const EconomyParams& e, const ChannelRates& rates, double dt) {
    const Partials g = partials(e);
    return g.dMr_dp * rates.dp_dt * dt + g.dMr_dR * rates.dR_dt * dt;
}

/// dM_r/dp * dp/dt + dM_r/dR * dR/dt. Zero along equilibrium-preserving
/// co-movements of p and R.
inline double equilibrium_channel_constraint(const EconomyParams& e, const ChannelRates& rates) {
    const Partials g = partials(e);
    return g.dMr_dp * rates.dp_dt + g.dMr_dR * rates.dR_dt;
}

/// delta_Mr plus the share channel dM_r/dc (dc/dp dp/dt + dc/dR dR/dt) dt.
inline double extended_delta_Mr(const EconomyParams& e, const ChannelRates& rates, const ShareChannel& share,
                                double dt) {
    const Partials g = partials(e);
    const double two_channel = g.dMr_dp * rates.dp_dt * dt + g.dMr_dR * rates.dR_dt * dt;
    const double share_term = g.dMr_dc * (share.dc_dp * rates.dp_dt + share.dc_dR * rates.dR_dt) * dt;
    return two_channel + share_term;
}

inline SensitivityReport sensitivity_report(const EconomyParams& e, const ChannelRates& rates, double dt) {
    return {partials(e), delta_Mr(e, rates, dt)};
}

enum class InvestmentSign { NonNegative, Negative, Boundary };

inline const char* to_string(InvestmentSign s) {
    switch (s) {
        case InvestmentSign::NonNegative: return "NonNegative";
        case InvestmentSign::Negative: return "Negative";
        case InvestmentSign::Boundary: return "Boundary";
    }
    return "?";
}

/// Sign of the change in consumer-goods investment when R moves, given
/// dc/dR > 0 and dK/dR < 0: non-negative iff the share responds faster than
/// capital, dc/dR > -dK/dR.
inline InvestmentSign consumer_investment_sign(double dc_dR, double dK_dR, double tol = kDefaultEqualityTolerance) {
    if (!(dc_dR > 0.0)) throw std::invalid_argument("consumer_investment_sign: requires dc/dR > 0");
    if (!(dK_dR < 0.0)) throw std::invalid_argument("consumer_investment_sign: requires dK/dR < 0");
    const double margin = dc_dR + dK_dR;
    if (std::abs(margin) <= tol) return InvestmentSign::Boundary;
    return margin > 0.0 ? InvestmentSign::NonNegative : InvestmentSign::Negative;
}

}  // namespace pvm
