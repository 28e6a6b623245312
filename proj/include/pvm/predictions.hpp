#pragma once

// Directional checks of the model's qualitative predictions and the
// sign tables for a falling or rising discount rate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvm/dynamics.hpp"
#include "pvm/economy.hpp"
#include "pvm/multiplier.hpp"
#include "pvm/sensitivity.hpp"

namespace pvm {

enum class Scenario { RFalls, RGrows };
enum class Quantity { Investment, ShareC, ShareI, GrowthRateInvC, GrowthRateInvI };
enum class Sign { Plus, Minus, NA };

inline constexpr std::array<Quantity, 5> kTableQuantities = {
    Quantity::Investment, Quantity::ShareC, Quantity::ShareI, Quantity::GrowthRateInvC, Quantity::GrowthRateInvI};

inline const char* to_string(Scenario s) { return s == Scenario::RFalls ? "RFalls" : "RGrows"; }

inline const char* to_string(Quantity q) {
    switch (q) {
        case Quantity::Investment: return "Investment";
        case Quantity::ShareC: return "ShareC";
        case Quantity::ShareI: return "ShareI";
        case Quantity::GrowthRateInvC: return "GrowthRateInvC";
        case Quantity::GrowthRateInvI: return "GrowthRateInvI";
    }
    return "?";
}

inline const char* heading(Quantity q) {
    switch (q) {
        case Quantity::Investment: return "Investment";
        case Quantity::ShareC: return "Share of investment in c";
        case Quantity::ShareI: return "Share of investment in i";
        case Quantity::GrowthRateInvC: return "Rate of growth of investment in c";
        case Quantity::GrowthRateInvI: return "Rate of growth of investment in i";
    }
    return "?";
}

inline const char* symbol(Sign s) {
    switch (s) {
        case Sign::Plus: return "+";
        case Sign::Minus: return "-";
        case Sign::NA: return "NA";
    }
    return "?";
}

inline Sign flip(Sign s) {
    if (s == Sign::Plus) return Sign::Minus;
    if (s == Sign::Minus) return Sign::Plus;
    return Sign::NA;
}

struct SignTable {
    Scenario scenario = Scenario::RFalls;
    std::array<Sign, 5> entries{};     // indexed like kTableQuantities
    std::array<double, 5> measured{};  // stepped-minus-base difference behind each sign

    Sign operator[](Quantity q) const { return entries[static_cast<std::size_t>(q)]; }
};

struct SignTableSettings {
    double rate_step = 0.01;    // |change in R|
    double share_speed = 0.1;   // eta in dc/dt = eta sign(R + n - p)
    double window = 1.0;        // comparison time after the change
    double tolerance = kDefaultEqualityTolerance;
};

namespace detail {

inline Sign sign_of(double v, double tol) {
    if (v > tol) return Sign::Plus;
    if (v < -tol) return Sign::Minus;
    return Sign::NA;
}

struct ShareRunEnd {
    double K, c, gross_investment;
};

inline ShareRunEnd run_share_dynamics(const CobbDouglas& cd, const EconomyParams& base, double R, double K0,
                                      const SignTableSettings& s) {
    DynamicsModel model;
    model.law = Law::MultiplierInvestment;
    model.share_speed = s.share_speed;
    model.share_deadband = s.tolerance;
    EconomyParams p0 = base;
    p0.R = R;
    IntegrationControls controls;
    controls.dt_out = s.window;
    const Trajectory tr = simulate(model, cd, p0, K0, s.window, controls);
    if (tr.terminated != Termination::HorizonReached)
        throw std::runtime_error(std::string("sign_table: simulation ended early: ") + tr.message);
    const Sample& end = tr.final();
    return {end.K, end.c, end.flow + base.n * end.K};
}

}  // namespace detail

/// Paired runs of dK/dt = C (M_r - 1) with shares following the corner logic
/// dc/dt = eta sign(R + n - p), started at the steady state K*(R) of `base`.
/// One run keeps R, the other moves it by rate_step; signs compare the two at
/// the end of the window. Investment is gross investment dK/dt + n K, split
/// c : i into consumer- and producer-goods investment.
inline SignTable sign_table(Scenario scenario, const EconomyParams& base, const CobbDouglas& cd,
                            const SignTableSettings& settings = {}) {
    if (settings.rate_step == 0.0)
        throw std::invalid_argument("sign_table: degenerate scenario (zero rate step), no comparison possible");
    if (!(settings.rate_step > 0.0)) throw std::invalid_argument("sign_table: rate_step must be > 0");
    const double K0 = steady_state_capital(cd, base.R, base.n);
    const double R_step = scenario == Scenario::RFalls ? base.R - settings.rate_step : base.R + settings.rate_step;

    const auto ref = detail::run_share_dynamics(cd, base, base.R, K0, settings);
    const auto moved = detail::run_share_dynamics(cd, base, R_step, K0, settings);

    const double inv_c_ref = ref.c * ref.gross_investment;
    const double inv_i_ref = (1.0 - ref.c) * ref.gross_investment;
    const double inv_c = moved.c * moved.gross_investment;
    const double inv_i = (1.0 - moved.c) * moved.gross_investment;

    SignTable t;
    t.scenario = scenario;
    t.measured = {moved.gross_investment - ref.gross_investment, moved.c - ref.c, ref.c - moved.c,
                  std::log(inv_c / inv_c_ref) / settings.window, std::log(inv_i / inv_i_ref) / settings.window};
    const double tol = settings.tolerance;
    t.entries = {detail::sign_of(t.measured[0], tol), detail::sign_of(t.measured[1], tol),
                 detail::sign_of(t.measured[2], tol), Sign::NA, detail::sign_of(t.measured[4], tol)};
    return t;
}

enum class Verdict { Pass, Fail, Untestable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Fail: return "Fail";
        case Verdict::Untestable: return "Untestable";
    }
    return "?";
}

struct PredictionCheck {
    std::string id;
    std::string statement;
    Verdict verdict = Verdict::Untestable;
    std::string measured;
};

struct PredictionReport {
    std::vector<PredictionCheck> checks;
    SignTable falls;
    SignTable grows;

    bool all_testable_pass() const {
        for (const auto& c : checks)
            if (c.verdict == Verdict::Fail) return false;
        return true;
    }
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline double mr_or_nan(const EconomyParams& e) {
    const auto m = present_multiplier(e);
    return m.convergent() ? *m.value : NAN;
}

}  // namespace detail

/// Evaluates predictions 1-11 around `base` by directional comparison with
/// perturbations of size |perturbation|. Investment is the multiplier-driven flow
/// C (M_r - 1) with C = 1. NA table cells are listed as Untestable.
inline PredictionReport check_predictions(const EconomyParams& base, const CobbDouglas& cd, double perturbation,
                                          const SignTableSettings& table_settings = {}) {
    using detail::fmt;
    using detail::mr_or_nan;
    const double h = std::abs(perturbation);
    if (h == 0.0) throw std::invalid_argument("check_predictions: perturbation must be nonzero");
    if (!present_multiplier(base).convergent()) throw std::domain_error("check_predictions: base diverges");
    const double tol = table_settings.tolerance;
    auto invest = [](double mr) { return mr - 1.0; };
    auto verdict = [](bool ok) { return ok ? Verdict::Pass : Verdict::Fail; };

    PredictionReport rep;
    auto add = [&](std::string id, std::string statement, Verdict v, std::string measured) {
        rep.checks.push_back({std::move(id), std::move(statement), v, std::move(measured)});
    };

    // 1: investment is increasing in M_r across a set of perturbed points
    {
        std::vector<EconomyParams> pts{base};
        for (double dR : {-h, h}) pts.push_back({base.c, base.p, base.n, base.R + dR});
        for (double dp : {-h, h}) pts.push_back({base.c, base.p + dp, base.n, base.R});
        std::vector<std::pair<double, double>> mi;
        for (const auto& e : pts) {
            const double m = mr_or_nan(e);
            if (std::isfinite(m)) mi.emplace_back(m, invest(m));
        }
        std::sort(mi.begin(), mi.end());
        bool ok = mi.size() >= 2;
        for (std::size_t j = 1; j < mi.size(); ++j) ok = ok && mi[j].second > mi[j - 1].second;
        add("1", "Investment grows as M_r grows", verdict(ok),
            "points=" + std::to_string(mi.size()) + "; M_r range " + fmt(mi.front().first) + " to " + fmt(mi.back().first));
    }
    // 2: R falls
    {
        const double m0 = mr_or_nan(base);
        const double m1 = mr_or_nan({base.c, base.p, base.n, base.R - h});
        add("2", "Investment grows as the discount rate falls", verdict(m1 > m0 && invest(m1) > invest(m0)),
            "M_r " + fmt(m0) + " -> " + fmt(m1));
    }
    // 3: p rises
    {
        const double m0 = mr_or_nan(base);
        const double m1 = mr_or_nan({base.c, base.p + h, base.n, base.R});
        add("3", "Investment grows as marginal productivity of capital grows",
            verdict(m1 > m0 && invest(m1) > invest(m0)), "M_r " + fmt(m0) + " -> " + fmt(m1));
    }
    // 4: three-channel first-order change; remainder is second order and the
    // share channel vanishes at p = R + n
    {
        const ChannelRates rates{h, -h};
        const ShareChannel share{-1.0, 1.0};
        auto remainder = [&](double dt) {
            const double dc = (share.dc_dp * rates.dp_dt + share.dc_dR * rates.dR_dt) * dt;
            const EconomyParams moved{base.c + dc, base.p + rates.dp_dt * dt, base.n, base.R + rates.dR_dt * dt};
            return std::abs(mr_or_nan(moved) - mr_or_nan(base) - extended_delta_Mr(base, rates, share, dt));
        };
        const double ratio = remainder(0.1) / remainder(0.05);
        EconomyParams eq = base;
        eq.p = eq.R + eq.n;
        const bool reduces = extended_delta_Mr(eq, rates, share, 1.0) == delta_Mr(eq, rates, 1.0);
        add("4", "Extended first-order change in M_r holds", verdict(ratio > 3.5 && ratio < 4.5 && reduces),
            "remainder halving ratio " + fmt(ratio) + (reduces ? "; reduces at equilibrium" : "; no reduction"));
    }
    // 5, 6: corner regimes either side of p = R + n
    {
        const EconomyParams above{base.c, base.R + base.n + h, base.n, base.R};
        const auto r = optimal_share(above, tol).regime;
        add("5", "Share of investment in consumer goods falls when p > R + n", verdict(r == ShareRegime::CornerZero),
            std::string("regime ") + to_string(r));
    }
    {
        const EconomyParams below{base.c, std::max(0.0, base.R + base.n - h), base.n, base.R};
        const auto r = optimal_share(below, tol).regime;
        add("6", "Share of investment in consumer goods grows when p < R + n", verdict(r == ShareRegime::CornerOne),
            std::string("regime ") + to_string(r));
    }
    // 7: multiplier at a converged capital steady state
    {
        const double k_star = steady_state_capital(cd, base.R, base.n);
        const double decay = (1.0 - cd.b) * (base.R + base.n) / k_star;  // -dp/dK * dK/dt linearised
        DynamicsModel model;
        model.law = Law::NetCapital;
        IntegrationControls controls;
        const double horizon = 40.0 / decay;
        controls.dt_out = horizon;
        const Trajectory tr = simulate(model, cd, base, 0.5 * k_star, horizon, controls);
        const Sample& end = tr.final();
        const double m = mr_or_nan({base.c, end.p, base.n, base.R});
        add("7", "The value of the multiplier is close to 1",
            verdict(tr.terminated == Termination::HorizonReached && std::abs(m - 1.0) <= 1e-6),
            "|M_r - 1| = " + fmt(std::abs(m - 1.0)));
    }

    rep.falls = sign_table(Scenario::RFalls, base, cd, table_settings);
    rep.grows = sign_table(Scenario::RGrows, base, cd, table_settings);
    const auto& F = rep.falls;
    const auto& G = rep.grows;
    const double dc_dp_dir = -table_settings.share_speed;  // dc/dt once p exceeds R + n
    add("8", "Share of investment in consumer goods falls when p grows or R falls",
        verdict(F[Quantity::ShareC] == Sign::Minus && G[Quantity::ShareC] == Sign::Plus && dc_dp_dir < 0.0),
        std::string("R falls: ") + symbol(F[Quantity::ShareC]) + "; R grows: " + symbol(G[Quantity::ShareC]));
    add("9", "Share of investment in means of production grows when p grows or R falls",
        verdict(F[Quantity::ShareI] == Sign::Plus && G[Quantity::ShareI] == Sign::Minus),
        std::string("R falls: ") + symbol(F[Quantity::ShareI]) + "; R grows: " + symbol(G[Quantity::ShareI]));
    add("10", "R falls: investment in i grows faster than investment in c",
        verdict(F.measured[4] > F.measured[3] && F[Quantity::GrowthRateInvI] == Sign::Plus),
        "g_i = " + fmt(F.measured[4]) + "; g_c = " + fmt(F.measured[3]));
    add("11", "R grows: investment in i grows slower than investment in c and falls",
        verdict(G.measured[4] < G.measured[3] && G.measured[4] < 0.0),
        "g_i = " + fmt(G.measured[4]) + "; g_c = " + fmt(G.measured[3]));
    add("RFalls.GrowthRateInvC", "R falls: rate of growth of investment in c", Verdict::Untestable,
        "NA; measured g_c = " + fmt(F.measured[3]));
    add("RGrows.GrowthRateInvC", "R grows: rate of growth of investment in c", Verdict::Untestable,
        "NA; measured g_c = " + fmt(G.measured[3]));
    return rep;
}

/// Plain-text rendering laid out like the comparison tables.
inline std::string format_sign_table(const SignTable& t) {
    std::string out = t.scenario == Scenario::RFalls ? "Predictions if discount rate R falls\n"
                                                     : "Predictions if discount rate R grows\n";
    const int label_width = 18;
    std::string header(label_width, ' ');
    std::string row = "Multiplier model";
    row.resize(label_width, ' ');
    for (std::size_t j = 0; j < kTableQuantities.size(); ++j) {
        std::string h = heading(kTableQuantities[j]);
        std::string cell = symbol(t.entries[j]);
        const std::size_t w = h.size() + 2;
        h.resize(w, ' ');
        cell.resize(w, ' ');
        header += h;
        row += cell;
    }
    while (!header.empty() && header.back() == ' ') header.pop_back();
    while (!row.empty() && row.back() == ' ') row.pop_back();
    return out + header + "\n" + row + "\n";
}

inline std::string format_report(const PredictionReport& rep) {
    std::string out;
    for (const auto& c : rep.checks) {
        std::string id = c.id;
        id.resize(18, ' ');
        std::string v = to_string(c.verdict);
        v.resize(11, ' ');
        out += id + v + c.statement + " [" + c.measured + "]\n";
    }
    return out;
}

/// CSV: id,verdict,measured (fields never contain commas).
inline std::string report_csv(const PredictionReport& rep) {
    std::string out = "id,verdict,measured\n";
    for (const auto& c : rep.checks) out += c.id + "," + to_string(c.verdict) + "," + c.measured + "\n";
    return out;
}

inline std::string sign_table_csv(const SignTable& t) {
    std::string out = "scenario,quantity,sign\n";
    for (std::size_t j = 0; j < kTableQuantities.size(); ++j)
        out += std::string(to_string(t.scenario)) + "," + to_string(kTableQuantities[j]) + "," + symbol(t.entries[j]) + "\n";
    return out;
}

}  // namespace pvm
