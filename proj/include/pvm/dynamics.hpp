#pragma once

// Capital-market dynamics: the Cobb-Douglas productivity map and a family of
// ODE laws that drive capital K, productivity p and the discount rate R
// toward the equilibrium p = R + n (equivalently M_r = 1).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pvm/economy.hpp"
#include "pvm/multiplier.hpp"
#include "pvm/numeric/ode.hpp"
#include "pvm/numeric/quadrature.hpp"
#include "pvm/numeric/roots.hpp"

namespace pvm {

/// Y = A L^alpha_L K^b with fixed A and L.
struct CobbDouglas {
    double A = 1.0;
    double L = 1.0;
    double alpha_L = 0.5;
    double b = 0.5;

    std::string violation() const {
        if (!(A > 0.0) || !std::isfinite(A)) return "A must be finite and > 0";
        if (!(L > 0.0) || !std::isfinite(L)) return "L must be finite and > 0";
        if (!(alpha_L > 0.0 && alpha_L < 1.0)) return "alpha_L must lie in (0, 1)";
        if (!(b > 0.0 && b < 1.0)) return "b must lie in (0, 1)";
        return {};
    }

    static CobbDouglas make(double A, double L, double alpha_L, double b) {
        CobbDouglas cd{A, L, alpha_L, b};
        if (auto why = cd.violation(); !why.empty()) throw std::invalid_argument(why);
        return cd;
    }

    /// A b L^alpha_L, the coefficient of K^{b-1} in dY/dK.
    double productivity_scale() const { return A * b * std::pow(L, alpha_L); }
};

/// p(K) = dY/dK = A b L^alpha_L K^{b-1}.
inline double marginal_productivity(const CobbDouglas& cd, double K) {
    if (!(K > 0.0)) throw std::invalid_argument("marginal_productivity: K must be > 0");
    return cd.productivity_scale() * std::pow(K, cd.b - 1.0);
}

/// Unique K* with p(K*) = R + n.
inline double steady_state_capital(const CobbDouglas& cd, double R, double n) {
    if (!(R + n > 0.0)) throw std::invalid_argument("steady_state_capital: R + n must be > 0");
    return std::pow(cd.productivity_scale() / (R + n), 1.0 / (1.0 - cd.b));
}

enum class Law {
    NetCapital,            // dK/dt = p(K) - R - n
    GrossInvestment,       // dK/dt = p(K) - R
    RateAdjust,            // dR/dt = p - R - n, p exogenous
    JointAdjust,           // dR/dt = p - R - n, dp/dt = R + n - p
    MultiplierInvestment,  // dK/dt = C (M_r - 1)
    System35,              // dK/dt = C (M_r(K, R) - 1), dR/dt = p(K) - R - n
    System36,              // dK/dt = C (M_r(K, R) - 1), dR/dt = K - K*(R)
    System37,              // dK/dt = C (M_r(p, R) - 1), dp/dt = R + n - p
    System38,              // dK/dt = C (M_r(K, f(K)) - 1), R = f(K)
};

inline constexpr std::array<std::pair<Law, std::string_view>, 9> kLawNames = {{
    {Law::NetCapital, "NetCapital"},
    {Law::GrossInvestment, "GrossInvestment"},
    {Law::RateAdjust, "RateAdjust"},
    {Law::JointAdjust, "JointAdjust"},
    {Law::MultiplierInvestment, "MultiplierInvestment"},
    {Law::System35, "System35"},
    {Law::System36, "System36"},
    {Law::System37, "System37"},
    {Law::System38, "System38"},
}};

inline std::string_view to_string(Law law) {
    for (const auto& [l, name] : kLawNames)
        if (l == law) return name;
    return "?";
}

inline std::optional<Law> parse_law(std::string_view name) {
    for (const auto& [l, n] : kLawNames)
        if (n == name) return l;
    return std::nullopt;
}

/// Whether the law's right-hand side needs a convergent M_r.
inline bool law_uses_multiplier(Law law) {
    switch (law) {
        case Law::MultiplierInvestment:
        case Law::System35:
        case Law::System36:
        case Law::System37:
        case Law::System38: return true;
        default: return false;
    }
}

/// Whether p is its own state variable rather than p(K).
inline bool law_has_free_productivity(Law law) {
    return law == Law::RateAdjust || law == Law::JointAdjust || law == Law::System37;
}

/// R = intercept + slope * K (System38).
struct RateResponse {
    double intercept = 0.05;
    double slope = 0.0;
    double operator()(double K) const { return intercept + slope * K; }
};

struct DynamicsModel {
    Law law = Law::NetCapital;
    double investment_gain = 1.0;   // C in dK/dt = C (M_r - 1)
    RateResponse rate_response{};   // System38 only
    double productivity_growth = 0.0;  // RateAdjust: p(t) = p0 e^{gamma t}
    double share_speed = 0.0;       // eta in dc/dt = eta sign(R + n - p); 0 holds c fixed
    double share_deadband = kDefaultEqualityTolerance;
};

struct Sample {
    double t = 0.0;
    double K = 0.0;
    double p = 0.0;
    double R = 0.0;
    double c = 0.0;
    std::optional<double> Mr;  // empty where the multiplier diverges
    double flow = 0.0;         // dK/dt under the law
};

enum class Termination { HorizonReached, DivergenceRegionEntered, StepFailure };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::HorizonReached: return "HorizonReached";
        case Termination::DivergenceRegionEntered: return "DivergenceRegionEntered";
        case Termination::StepFailure: return "StepFailure";
    }
    return "?";
}

struct Trajectory {
    std::vector<Sample> samples;
    Termination terminated = Termination::HorizonReached;
    std::string message;

    const Sample& final() const { return samples.back(); }
};

struct IntegrationControls {
    double dt_out = 1.0;
    numeric::OdeSettings ode{};  // rel 1e-9, abs 1e-12 by default
};

namespace detail {

// Integration state: (K, p, R, c). Components a law does not move keep a zero
// derivative; p is overwritten by p(K) for laws without free productivity.
using DynState = numeric::State<4>;

enum class EvalFailure { None, InvalidState, Divergent };

struct LawPoint {
    double K, p, R, c;
    std::optional<double> Mr;
    DynState derivative{};
};

struct LawContext {
    const DynamicsModel& model;
    const CobbDouglas& cd;
    double n;
    double p0;
};

inline std::optional<double> multiplier_at(double c, double p, double n, double R) {
    if (!(R > -1.0)) return std::nullopt;
    const MultiplierResult m = present_multiplier(EconomyParams{c, p, n, R});
    if (!m.convergent()) return std::nullopt;
    return m.value;
}

// K*(R) for System36: root of M_r(K, R) = 1, bracketed and bisected in log K.
inline double implicit_steady_capital(const CobbDouglas& cd, double c, double n, double R, double K_hint) {
    auto excess = [&](double u) {
        const double K = std::exp(u);
        const auto m = multiplier_at(c, marginal_productivity(cd, K), n, R);
        return m ? *m - 1.0 : 1.0;  // divergence sits on the high-p (small K) side
    };
    double lo = std::log(K_hint) - 0.5;
    double hi = std::log(K_hint) + 0.5;
    for (int g = 0; g < 200 && excess(lo) <= 0.0; ++g) lo -= 1.0;
    for (int g = 0; g < 200 && excess(hi) >= 0.0; ++g) hi += 1.0;
    return std::exp(numeric::bisect(excess, lo, hi, 1e-13));
}

inline std::optional<LawPoint> evaluate_law(const LawContext& ctx, double t, const DynState& y,
                                            EvalFailure& failure) {
    const DynamicsModel& m = ctx.model;
    const double n = ctx.n;
    LawPoint pt{y[0], y[1], y[2], y[3], std::nullopt, {}};
    failure = EvalFailure::None;
    if (!(pt.K > 0.0) && !law_has_free_productivity(m.law)) {
        failure = EvalFailure::InvalidState;
        return std::nullopt;
    }
    if (m.law == Law::RateAdjust) {
        pt.p = ctx.p0 * std::exp(m.productivity_growth * t);
    } else if (!law_has_free_productivity(m.law)) {
        pt.p = marginal_productivity(ctx.cd, pt.K);
    }
    if (m.law == Law::System38) pt.R = m.rate_response(pt.K);
    if (!(pt.R > -1.0)) {
        failure = EvalFailure::InvalidState;
        return std::nullopt;
    }
    pt.Mr = multiplier_at(pt.c, pt.p, n, pt.R);
    if (law_uses_multiplier(m.law) && !pt.Mr) {
        failure = EvalFailure::Divergent;
        return std::nullopt;
    }

    DynState& d = pt.derivative;
    const double gap = pt.p - pt.R - n;
    switch (m.law) {
        case Law::NetCapital: d[0] = gap; break;
        case Law::GrossInvestment: d[0] = pt.p - pt.R; break;
        case Law::RateAdjust: d[2] = gap; break;
        case Law::JointAdjust:
            d[1] = -gap;
            d[2] = gap;
            break;
        case Law::MultiplierInvestment:
        case Law::System38: d[0] = m.investment_gain * (*pt.Mr - 1.0); break;
        case Law::System35:
            d[0] = m.investment_gain * (*pt.Mr - 1.0);
            d[2] = gap;
            break;
        case Law::System36:
            d[0] = m.investment_gain * (*pt.Mr - 1.0);
            d[2] = pt.K - implicit_steady_capital(ctx.cd, pt.c, n, pt.R, pt.K);
            break;
        case Law::System37:
            d[0] = m.investment_gain * (*pt.Mr - 1.0);
            d[1] = -gap;
            break;
    }
    if (m.share_speed > 0.0) {
        const double drive = -gap;  // R + n - p
        double dc = 0.0;
        if (drive > m.share_deadband) dc = m.share_speed;
        if (drive < -m.share_deadband) dc = -m.share_speed;
        if ((pt.c <= 0.0 && dc < 0.0) || (pt.c >= 1.0 && dc > 0.0)) dc = 0.0;
        d[3] = dc;
    }
    return pt;
}

inline Sample to_sample(double t, const LawPoint& pt) {
    return {t, pt.K, pt.p, pt.R, pt.c, pt.Mr, pt.derivative[0]};
}

}  // namespace detail

/// dK/dt of `law` at a recorded sample, holding the sample's (K, p, R, c).
/// Only meaningful for laws whose K flow depends on those quantities alone.
inline double law_capital_flow(Law law, const Sample& s, double n, double investment_gain = 1.0) {
    switch (law) {
        case Law::NetCapital: return s.p - s.R - n;
        case Law::GrossInvestment: return s.p - s.R;
        case Law::RateAdjust:
        case Law::JointAdjust: return 0.0;
        default: {
            const auto m = detail::multiplier_at(s.c, s.p, n, s.R);
            if (!m) throw std::domain_error("law_capital_flow: multiplier diverges");
            return investment_gain * (*m - 1.0);
        }
    }
}

/// Integrates `model` from K0 (and p0, R0, c0 taken from `params0`) over
/// [0, horizon], sampling every controls.dt_out plus the final time.
inline Trajectory simulate(const DynamicsModel& model, const CobbDouglas& cd, const EconomyParams& params0,
                           double K0, double horizon, const IntegrationControls& controls = {}) {
    if (!(K0 > 0.0)) throw std::invalid_argument("simulate: K0 must be > 0");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("simulate: horizon must be > 0");
    if (!(controls.dt_out > 0.0)) throw std::invalid_argument("simulate: dt_out must be > 0");
    if (!(model.investment_gain > 0.0)) throw std::invalid_argument("simulate: investment_gain must be > 0");
    if (auto why = cd.violation(); !why.empty()) throw std::invalid_argument("simulate: " + why);

    const detail::LawContext ctx{model, cd, params0.n, params0.p};
    detail::EvalFailure last_failure = detail::EvalFailure::None;
    auto rhs = [&](double t, const detail::DynState& y) -> std::optional<detail::DynState> {
        detail::EvalFailure f;
        auto pt = detail::evaluate_law(ctx, t, y, f);
        if (!pt) {
            last_failure = f;
            return std::nullopt;
        }
        return pt->derivative;
    };

    Trajectory traj;
    detail::DynState y0{K0, params0.p, params0.R, params0.c};
    if (model.law == Law::System38) y0[2] = model.rate_response(K0);

    auto record = [&](double t, const detail::DynState& y) -> bool {
        detail::EvalFailure f;
        auto pt = detail::evaluate_law(ctx, t, y, f);
        if (!pt) {
            last_failure = f;
            return false;
        }
        traj.samples.push_back(detail::to_sample(t, *pt));
        return true;
    };

    if (!record(0.0, y0)) {
        traj.terminated = last_failure == detail::EvalFailure::Divergent ? Termination::DivergenceRegionEntered
                                                                          : Termination::StepFailure;
        traj.message = "initial state outside the law's domain";
        return traj;
    }

    long next_index = 1;
    auto next_time = [&] { return std::min(horizon, static_cast<double>(next_index) * controls.dt_out); };
    bool record_failed = false;
    auto observer = [&](const numeric::DenseStep<4>& step) {
        while (next_index > 0 && next_time() <= step.t_end()) {
            const double ts = next_time();
            const auto y = ts == step.t_end() ? step.y_end() : step(ts);
            if (!record(ts, y)) {
                record_failed = true;
                return false;
            }
            if (ts >= horizon) {
                next_index = -1;
                break;
            }
            ++next_index;
        }
        return true;
    };

    const auto res = numeric::integrate<4>(rhs, 0.0, y0, horizon, controls.ode, observer);
    if (record_failed || res.status == numeric::OdeStatus::StoppedByObserver) {
        traj.terminated = last_failure == detail::EvalFailure::Divergent ? Termination::DivergenceRegionEntered
                                                                          : Termination::StepFailure;
        traj.message = "trajectory left the law's domain";
        return traj;
    }
    if (res.status != numeric::OdeStatus::Completed) {
        if (res.domain_rejection && last_failure == detail::EvalFailure::Divergent) {
            traj.terminated = Termination::DivergenceRegionEntered;
            traj.message = "multiplier convergence condition failed";
        } else {
            traj.terminated = Termination::StepFailure;
            traj.message = res.status == numeric::OdeStatus::MaxStepsExceeded ? "step budget exhausted"
                                                                               : "step size underflow";
        }
        if (res.t > traj.samples.back().t) record(res.t, res.y);
    }
    return traj;
}

/// Time for dK/dt = p(K) - R - n to carry capital from K_from to K_to:
///   int_{K_from}^{K_to} dK / (p(K) - R - n).
/// Both ends must lie strictly on the same side of K*.
inline double time_of_capital(const CobbDouglas& cd, double R, double n, double K_from, double K_to) {
    if (!(K_from > 0.0 && K_to > 0.0)) throw std::invalid_argument("time_of_capital: capital levels must be > 0");
    if (K_from == K_to) return 0.0;
    const double k_star = steady_state_capital(cd, R, n);
    const double lo = std::min(K_from, K_to);
    const double hi = std::max(K_from, K_to);
    if (lo <= k_star && k_star <= hi)
        throw std::domain_error("time_of_capital: interval contains the steady state K*");
    auto inv_flow = [&](double K) { return 1.0 / (marginal_productivity(cd, K) - R - n); };
    numeric::QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-13;
    return numeric::integrate(inv_flow, K_from, K_to, opts).value;
}

/// Exponentially growing productivity p(t) = p0 e^{gamma t} with the discount
/// rate following dR/dt = p - R - n.
struct GrowthScenario {
    double gamma = 0.0;
    double beta = 0.0;

    /// beta that makes the closed form start at R(0) = R0.
    static GrowthScenario starting_at(double gamma, double p0, double n, double R0) {
        if (gamma == -1.0) throw std::invalid_argument("GrowthScenario: gamma must differ from -1");
        return {gamma, R0 + n - p0 / (1.0 + gamma)};
    }
};

/// R(t) = beta e^{-t} - n + p0 e^{gamma t} / (1 + gamma).
inline double growth_scenario_rate(const GrowthScenario& scn, double p0, double n, double t) {
    if (scn.gamma == -1.0) throw std::invalid_argument("growth_scenario_rate: gamma must differ from -1");
    return scn.beta * std::exp(-t) - n + p0 * std::exp(scn.gamma * t) / (1.0 + scn.gamma);
}

enum class BlowupOutcome { ThresholdCrossed, ConvergenceLost, HorizonExhausted };

inline const char* to_string(BlowupOutcome o) {
    switch (o) {
        case BlowupOutcome::ThresholdCrossed: return "ThresholdCrossed";
        case BlowupOutcome::ConvergenceLost: return "ConvergenceLost";
        case BlowupOutcome::HorizonExhausted: return "HorizonExhausted";
    }
    return "?";
}

struct BlowupReport {
    BlowupOutcome outcome = BlowupOutcome::HorizonExhausted;
    double time = 0.0;     // crossing/exit time, or the horizon
    double max_Mr = 0.0;   // largest multiplier seen at step ends
};

/// Integrates dR/dt = p0 e^{gamma t} - R - n from R(0) = params.R with c and n
/// fixed and reports the first time M_r exceeds `threshold`, or the first
/// time the multiplier stops converging, whichever comes first.
inline BlowupReport multiplier_blowup_check(const GrowthScenario& scn, const EconomyParams& params, double threshold,
                                            double horizon = 1000.0, const numeric::OdeSettings& ode = {}) {
    if (!(threshold > 1.0)) throw std::invalid_argument("multiplier_blowup_check: threshold must be > 1");
    if (!(scn.gamma >= 0.0)) throw std::invalid_argument("multiplier_blowup_check: gamma must be >= 0");
    const double p0 = params.p;
    const double n = params.n;
    auto p_at = [&](double t) { return p0 * std::exp(scn.gamma * t); };
    auto rhs = [&](double t, const numeric::State<1>& y) -> std::optional<numeric::State<1>> {
        return numeric::State<1>{p_at(t) - y[0] - n};
    };
    // > 0 while M_r > threshold or divergent; the multiplier is cp/d with d the
    // present denominator, so both events are sign changes of simple functions.
    auto denom = [&](double t, double R) { return (R + n - p_at(t)) + params.c * p_at(t); };
    auto excess = [&](double t, double R) {
        const double d = denom(t, R);
        if (!(d > 0.0)) return 1.0;
        return params.c * p_at(t) / d - threshold;
    };

    BlowupReport report;
    report.time = horizon;
    {
        const double d0 = denom(0.0, params.R);
        if (!(d0 > 0.0)) return {BlowupOutcome::ConvergenceLost, 0.0, 0.0};
        report.max_Mr = params.c * p0 / d0;
        if (report.max_Mr > threshold) return {BlowupOutcome::ThresholdCrossed, 0.0, report.max_Mr};
    }
    auto observer = [&](const numeric::DenseStep<1>& step) {
        const double t1 = step.t_end();
        const double R1 = step.y_end()[0];
        const double d1 = denom(t1, R1);
        if (d1 > 0.0) report.max_Mr = std::max(report.max_Mr, params.c * p_at(t1) / d1);
        if (excess(t1, R1) <= 0.0) return true;
        const double t0 = step.t_begin();
        const double t_cross = numeric::bisect([&](double t) { return excess(t, step(t)[0]); }, t0, t1, 1e-12);
        // which event came first: the threshold is crossed strictly before the
        // denominator reaches zero unless the step jumped over both
        const double d_cross = denom(t_cross, step(t_cross)[0]);
        report.outcome = d_cross > 0.0 ? BlowupOutcome::ThresholdCrossed : BlowupOutcome::ConvergenceLost;
        report.time = t_cross;
        return false;
    };
    numeric::integrate<1>(rhs, 0.0, numeric::State<1>{params.R}, horizon, ode, observer);
    return report;
}

struct FixedPoint {
    Sample state;           // t = 0; K, p, R, c at the fixed point
    double residual = 0.0;  // max |component of the right-hand side|
    bool converged = false;
};

/// Searches for a zero of the law's right-hand side near (K0, params0) by
/// Levenberg-Marquardt on the moving state components. For laws with a curve
/// of fixed points the result is the point the iteration settles on.
inline FixedPoint find_fixed_point(const DynamicsModel& model, const CobbDouglas& cd, const EconomyParams& params0,
                                   double K0, int max_iter = 200) {
    const detail::LawContext ctx{model, cd, params0.n, params0.p};
    std::vector<std::size_t> active;
    switch (model.law) {
        case Law::RateAdjust: active = {2}; break;
        case Law::JointAdjust: active = {1, 2}; break;
        case Law::System35:
        case Law::System36: active = {0, 2}; break;
        case Law::System37: active = {0, 1}; break;
        default: active = {0}; break;
    }
    const std::size_t m = active.size();
    detail::DynState y{K0, params0.p, params0.R, params0.c};
    if (model.law == Law::System38) y[2] = model.rate_response(K0);

    auto residual = [&](const detail::DynState& s, std::array<double, 2>& f) -> bool {
        detail::EvalFailure fail;
        auto pt = detail::evaluate_law(ctx, 0.0, s, fail);
        if (!pt) return false;
        for (std::size_t j = 0; j < m; ++j) f[j] = pt->derivative[active[j]];
        return true;
    };
    auto norm2 = [&](const std::array<double, 2>& f) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += f[j] * f[j];
        return s;
    };

    std::array<double, 2> f{};
    if (!residual(y, f)) throw std::domain_error("find_fixed_point: initial state outside the law's domain");
    double lambda = 1e-3;
    FixedPoint out;
    for (int it = 0; it < max_iter && norm2(f) > 1e-30; ++it) {
        std::array<std::array<double, 2>, 2> J{};
        for (std::size_t col = 0; col < m; ++col) {
            detail::DynState yh = y;
            const double h = 1e-7 * std::max(1.0, std::abs(y[active[col]]));
            yh[active[col]] += h;
            std::array<double, 2> fh{};
            if (!residual(yh, fh)) {
                yh[active[col]] = y[active[col]] - h;
                if (!residual(yh, fh)) throw std::domain_error("find_fixed_point: cannot differentiate");
                for (std::size_t row = 0; row < m; ++row) J[row][col] = (f[row] - fh[row]) / h;
            } else {
                for (std::size_t row = 0; row < m; ++row) J[row][col] = (fh[row] - f[row]) / h;
            }
        }
        // (J^T J + lambda diag) delta = -J^T f
        std::array<std::array<double, 2>, 2> A{};
        std::array<double, 2> g{};
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b)
                for (std::size_t r = 0; r < m; ++r) A[a][b] += J[r][a] * J[r][b];
            for (std::size_t r = 0; r < m; ++r) g[a] -= J[r][a] * f[r];
        }
        bool improved = false;
        for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
            auto M = A;
            for (std::size_t a = 0; a < m; ++a) M[a][a] += lambda * std::max(A[a][a], 1e-300);
            std::array<double, 2> delta{};
            if (m == 1) {
                delta[0] = g[0] / M[0][0];
            } else {
                const double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
                delta[0] = (g[0] * M[1][1] - M[0][1] * g[1]) / det;
                delta[1] = (M[0][0] * g[1] - g[0] * M[1][0]) / det;
            }
            detail::DynState trial = y;
            for (std::size_t j = 0; j < m; ++j) trial[active[j]] += delta[j];
            std::array<double, 2> ft{};
            if (residual(trial, ft) && norm2(ft) < norm2(f)) {
                y = trial;
                f = ft;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) break;
    }
    detail::EvalFailure fail;
    const auto pt = detail::evaluate_law(ctx, 0.0, y, fail);
    out.state = detail::to_sample(0.0, *pt);
    bool small = true;
    for (std::size_t j = 0; j < m; ++j) {
        out.residual = std::max(out.residual, std::abs(f[j]));
        small = small && std::abs(f[j]) <= 1e-11 * std::max(1.0, std::abs(y[active[j]]));
    }
    out.converged = small;
    return out;
}

}  // namespace pvm
