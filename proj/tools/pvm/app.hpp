#pragma once

// Subcommand dispatch for the `pvm` command-line tool.
//
// Exit status: 0 success, 1 configuration error, 2 numerical error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pvm/pvm.hpp"
#include "pvm/config.hpp"

namespace pvm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    int jobs = 1;
    double tolerance = kDefaultEqualityTolerance;
};

namespace detail {

using csv::number;

inline ScenarioConfig load_config(const CommonOptions& opts) {
    ScenarioConfig cfg = opts.config_path.empty() ? ScenarioConfig::parse("", "<command line>")
                                                  : ScenarioConfig::load(opts.config_path);
    for (std::size_t j = 0; j < opts.overrides.size(); ++j) cfg.apply_override(opts.overrides[j], j + 1);
    return cfg;
}

inline bool is_hyperbolic(const ScenarioConfig& cfg) {
    const std::string d = cfg.text("discounting").value_or("exponential");
    if (d == "exponential") return false;
    if (d == "hyperbolic") return true;
    throw cfg.error_at("discounting", "expected 'exponential' or 'hyperbolic', got '" + d + "'");
}

inline HyperbolicSpec hyperbolic_spec(const ScenarioConfig& cfg) {
    const double k = cfg.require_number("k", "required when discounting = hyperbolic");
    if (!(k > 0.0)) throw cfg.error_at("k", "must be > 0");
    return {k};
}

// Validates each field against its own config line.
inline void check_params(const ScenarioConfig& cfg, const EconomyParams& e, bool need_R) {
    if (!(e.c >= 0.0 && e.c <= 1.0)) throw cfg.error_at("c", "must lie in [0, 1]");
    if (!(e.p >= 0.0)) throw cfg.error_at("p", "must be >= 0");
    if (!(e.n > 0.0 && e.n < 1.0)) throw cfg.error_at("n", "must lie in (0, 1)");
    if (need_R && !(e.R > 0.0)) throw cfg.error_at("R", "must be > 0");
}

inline EconomyParams economy(const ScenarioConfig& cfg, bool need_R, bool need_p = true) {
    EconomyParams e;
    e.c = cfg.require_number("c");
    e.p = need_p ? cfg.require_number("p") : cfg.number_or("p", 0.0);
    e.n = cfg.require_number("n");
    e.R = need_R ? cfg.require_number("R", "required for exponential discounting") : cfg.number_or("R", 1.0);
    check_params(cfg, e, need_R);
    return e;
}

inline CobbDouglas cobb_douglas(const ScenarioConfig& cfg) {
    CobbDouglas cd{cfg.number_or("A", 1.0), cfg.number_or("L", 1.0), cfg.number_or("alpha_L", 0.5),
                   cfg.number_or("b", 0.5)};
    if (!(cd.A > 0.0)) throw cfg.error_at("A", "must be > 0");
    if (!(cd.L > 0.0)) throw cfg.error_at("L", "must be > 0");
    if (!(cd.alpha_L > 0.0 && cd.alpha_L < 1.0)) throw cfg.error_at("alpha_L", "must lie in (0, 1)");
    if (!(cd.b > 0.0 && cd.b < 1.0)) throw cfg.error_at("b", "must lie in (0, 1)");
    return cd;
}

inline void emit(const CommonOptions& opts, std::ostream& out, const std::string& text) {
    if (opts.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(opts.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("--out: cannot open '" + opts.out_path + "' for writing");
    file << text;
}

inline std::string kv(const std::string& key, const std::string& value) { return key + " = " + value + "\n"; }

inline int cmd_multiplier(const CommonOptions& opts, std::ostream& out) {
    const ScenarioConfig cfg = load_config(opts);
    std::string text;
    if (is_hyperbolic(cfg)) {
        const HyperbolicSpec spec = hyperbolic_spec(cfg);
        const EconomyParams e = economy(cfg, false);
        const MultiplierResult m = hyperbolic_multiplier(e, spec);
        text += kv("discounting", "hyperbolic");
        text += kv("k", number(spec.k));
        text += kv("growth_ratio", number(m.growth_ratio));
        text += kv("status", to_string(m.status));
        text += kv("M_r", number(m.value));
    } else {
        const EconomyParams e = economy(cfg, true);
        const MultiplierResult fut = future_multiplier(e);
        const MultiplierResult pv = present_multiplier(e);
        text += kv("discounting", "exponential");
        text += kv("M_growth_ratio", number(fut.growth_ratio));
        text += kv("M_status", to_string(fut.status));
        text += kv("M", number(fut.value));
        text += kv("growth_ratio", number(pv.growth_ratio));
        text += kv("status", to_string(pv.status));
        text += kv("M_r", number(pv.value));
        if (auto w = cfg.number("wealth")) {
            if (!(*w >= 0.0)) throw cfg.error_at("wealth", "must be >= 0");
            if (!pv.convergent()) throw NumericalError("consumer choice needs a convergent M_r");
            const ChoiceAllocation a = consumer_choice({*w, *pv.value}, opts.tolerance);
            text += kv("invested_min", number(a.invested_min));
            text += kv("invested_max", number(a.invested_max));
            text += kv("consumption", number(a.consumption()));
        }
    }
    emit(opts, out, text);
    return kExitOk;
}

inline int cmd_optimum(const CommonOptions& opts, std::ostream& out) {
    const ScenarioConfig cfg = load_config(opts);
    std::string text;
    const bool hyper = cfg.has("k");
    EconomyParams e;
    e.c = cfg.number_or("c", 0.5);
    e.p = cfg.require_number("p");
    e.n = cfg.require_number("n");
    e.R = hyper ? cfg.number_or("R", 1.0) : cfg.require_number("R");
    check_params(cfg, e, !hyper || cfg.has("R"));
    if (cfg.has("R")) {
        const ShareOptimum so = optimal_share(e, opts.tolerance);
        text += kv("regime", to_string(so.regime));
        text += kv("discriminant", number(so.discriminant));
        text += kv("equilibrium_gap", number(equilibrium_gap(e)));
    }
    if (hyper) {
        const HyperbolicSpec spec = hyperbolic_spec(cfg);
        const ShareInterval within{cfg.number_or("share_lo", 0.0), cfg.number_or("share_hi", 1.0)};
        if (!(within.lo >= 0.0 && within.lo < within.hi && within.hi <= 1.0))
            throw cfg.error_at(cfg.has("share_lo") ? "share_lo" : "share_hi", "need 0 <= share_lo < share_hi <= 1");
        const HyperbolicShareOptimum h = hyperbolic_share_optimum(e, spec, within);
        std::string roots;
        for (double r : h.roots) roots += (roots.empty() ? "" : ",") + number(r);
        text += kv("hyperbolic_roots", roots.empty() ? "none" : roots);
        if (h.roots.empty())
            text += kv("hyperbolic_slope_sign", h.sign == DerivativeSign::Positive   ? "Positive"
                                                : h.sign == DerivativeSign::Negative ? "Negative"
                                                                                     : "Mixed");
    }
    emit(opts, out, text);
    return kExitOk;
}

inline int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    const ScenarioConfig cfg = load_config(opts);
    const std::string law_name = cfg.require_text("model", "required by simulate");
    const auto law = parse_law(law_name);
    if (!law) throw cfg.error_at("model", "unknown law '" + law_name + "'");
    DynamicsModel model;
    model.law = *law;
    model.investment_gain = cfg.number_or("gain", 1.0);
    if (!(model.investment_gain > 0.0)) throw cfg.error_at("gain", "must be > 0");
    model.productivity_growth = cfg.number_or("gamma", 0.0);
    model.rate_response = {cfg.number_or("rate_f0", cfg.number_or("R", 0.05)), cfg.number_or("rate_f1", 0.0)};
    model.share_speed = cfg.number_or("share_speed", 0.0);
    model.share_deadband = opts.tolerance;
    if (model.share_speed < 0.0) throw cfg.error_at("share_speed", "must be >= 0");

    const CobbDouglas cd = cobb_douglas(cfg);
    const double K0 = cfg.require_number("K0", "required by simulate");
    if (!(K0 > 0.0)) throw cfg.error_at("K0", "must be > 0");
    const bool free_p = law_has_free_productivity(model.law);
    EconomyParams e = economy(cfg, true, free_p);
    if (!free_p) e.p = marginal_productivity(cd, K0);
    const double horizon = cfg.require_number("horizon", "required by simulate");
    if (!(horizon > 0.0)) throw cfg.error_at("horizon", "must be > 0");
    IntegrationControls controls;
    controls.dt_out = cfg.number_or("dt_out", 1.0);
    if (!(controls.dt_out > 0.0)) throw cfg.error_at("dt_out", "must be > 0");

    const Trajectory tr = simulate(model, cd, e, K0, horizon, controls);
    emit(opts, out, csv::trajectory(tr));
    if (tr.terminated != Termination::HorizonReached) {
        err << "pvm simulate: " << to_string(tr.terminated) << ": " << tr.message << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

struct SweepAxis {
    std::string variable;
    std::vector<double> values;
};

inline SweepAxis sweep_axis(const ScenarioConfig& cfg, bool hyper) {
    SweepAxis axis;
    axis.variable = cfg.require_text("sweep.variable", "required by sweep");
    static const std::vector<std::string> allowed = {"c", "p", "n", "R", "k"};
    if (std::find(allowed.begin(), allowed.end(), axis.variable) == allowed.end())
        throw cfg.error_at("sweep.variable", "expected one of c, p, n, R, k");
    if (axis.variable == "k" && !hyper) throw cfg.error_at("sweep.variable", "k sweeps need discounting = hyperbolic");
    if (axis.variable == "R" && hyper) throw cfg.error_at("sweep.variable", "R is unused under hyperbolic discounting");
    const double from = cfg.require_number("sweep.from", "required by sweep");
    const double to = cfg.require_number("sweep.to", "required by sweep");
    const auto steps = cfg.integer("sweep.steps");
    if (!steps) throw ConfigError(cfg.source() + ": missing required key 'sweep.steps' (required by sweep)");
    if (*steps < 1 || *steps > 10'000'000) throw cfg.error_at("sweep.steps", "must lie in [1, 10000000]");
    const std::string mode = cfg.text("sweep.mode").value_or("grid");
    if (mode == "grid") {
        for (std::int64_t j = 0; j < *steps; ++j)
            axis.values.push_back(*steps == 1 ? from : from + (to - from) * static_cast<double>(j) / static_cast<double>(*steps - 1));
    } else if (mode == "random") {
        const auto seed = cfg.integer("seed");
        if (!seed) throw ConfigError(cfg.source() + ": missing required key 'seed' (required when sweep.mode = random)");
        std::mt19937_64 rng(static_cast<std::uint64_t>(*seed));
        std::uniform_real_distribution<double> dist(std::min(from, to), std::max(from, to));
        for (std::int64_t j = 0; j < *steps; ++j) axis.values.push_back(dist(rng));
    } else {
        throw cfg.error_at("sweep.mode", "expected 'grid' or 'random'");
    }
    return axis;
}

inline std::string sweep_row(std::size_t index, const SweepAxis& axis, double value, EconomyParams e,
                             std::optional<HyperbolicSpec> spec, double tol) {
    if (axis.variable == "c") e.c = value;
    if (axis.variable == "p") e.p = value;
    if (axis.variable == "n") e.n = value;
    if (axis.variable == "R") e.R = value;
    if (axis.variable == "k") spec->k = value;
    std::string row = std::to_string(index) + "," + number(value) + ",";
    if (spec) {
        const MultiplierResult m = hyperbolic_multiplier(e, *spec);
        return row + to_string(m.status) + "," + number(m.value) + ",,,,\n";
    }
    const MultiplierResult m = present_multiplier(e);
    row += std::string(to_string(m.status)) + "," + number(m.value) + ",";
    if (m.convergent() && present_denominator(e) > 0.0 && e.r() * line_ratio(e) < 1.0) {
        const Partials g = partials(e);
        row += number(g.dMr_dp) + "," + number(g.dMr_dR) + "," + number(g.dMr_dc) + ",";
    } else {
        row += ",,,";
    }
    return row + to_string(optimal_share(e, tol).regime) + "\n";
}

inline int cmd_sweep(const CommonOptions& opts, std::ostream& out) {
    const ScenarioConfig cfg = load_config(opts);
    const bool hyper = is_hyperbolic(cfg);
    std::optional<HyperbolicSpec> spec;
    if (hyper) {
        spec = cfg.has("k") || cfg.text("sweep.variable") != std::string("k") ? hyperbolic_spec(cfg) : HyperbolicSpec{1.0};
    }
    const SweepAxis axis = sweep_axis(cfg, hyper);
    EconomyParams base;
    auto base_value = [&](const char* key, bool required) {
        if (axis.variable == key) return cfg.number_or(key, 0.5);
        return required ? cfg.require_number(key) : cfg.number_or(key, 1.0);
    };
    base.c = base_value("c", true);
    base.p = base_value("p", true);
    base.n = base_value("n", true);
    base.R = base_value("R", !hyper);
    // constraints are intervals, so valid endpoints make every grid point valid
    for (double v : {axis.values.front(), *std::max_element(axis.values.begin(), axis.values.end()),
                     *std::min_element(axis.values.begin(), axis.values.end())}) {
        EconomyParams e = base;
        if (axis.variable == "c") e.c = v;
        if (axis.variable == "p") e.p = v;
        if (axis.variable == "n") e.n = v;
        if (axis.variable == "R") e.R = v;
        if (axis.variable == "k" && !(v > 0.0)) throw cfg.error_at("sweep.from", "k must stay > 0 over the sweep");
        const std::string why = e.violation();
        if (!why.empty() && !(hyper && why.rfind("R ", 0) == 0))
            throw cfg.error_at("sweep.from", "sweep leaves the valid range: " + why);
    }

    std::vector<std::string> rows(axis.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < rows.size(); j = next++)
            rows[j] = sweep_row(j, axis, axis.values[j], base, spec, opts.tolerance);
    };
    const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(rows.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string text = "index," + axis.variable + ",status,M_r,dMr_dp,dMr_dR,dMr_dc,regime\n";
    for (const auto& r : rows) text += r;
    emit(opts, out, text);
    return kExitOk;
}

inline int cmd_sensitivity(const CommonOptions& opts, std::ostream& out) {
    const ScenarioConfig cfg = load_config(opts);
    const EconomyParams e = economy(cfg, true);
    if (!present_multiplier(e).convergent()) throw NumericalError("sensitivity: present multiplier diverges");
    const ChannelRates rates{cfg.number_or("dp_dt", 0.0), cfg.number_or("dR_dt", 0.0)};
    const double dt = cfg.number_or("dt", 1.0);
    const SensitivityReport rep = sensitivity_report(e, rates, dt);

    // central differences of M_r, step 1e-6
    auto mr = [](EconomyParams x) {
        const auto m = present_multiplier(x);
        if (!m.convergent()) throw NumericalError("sensitivity: finite-difference point diverges");
        return *m.value;
    };
    const double h = 1e-6;
    auto fd = [&](double EconomyParams::*field) {
        EconomyParams up = e, dn = e;
        up.*field += h;
        dn.*field -= h;
        return (mr(up) - mr(dn)) / (2.0 * h);
    };
    const double fd_p = fd(&EconomyParams::p);
    const double fd_R = fd(&EconomyParams::R);
    const double fd_c = fd(&EconomyParams::c);
    std::string text;
    text += kv("M_r", number(mr(e)));
    text += kv("dMr_dp", number(rep.partials.dMr_dp));
    text += kv("dMr_dR", number(rep.partials.dMr_dR));
    text += kv("dMr_dc", number(rep.partials.dMr_dc));
    text += kv("fd_residual_dp", number(rep.partials.dMr_dp - fd_p));
    text += kv("fd_residual_dR", number(rep.partials.dMr_dR - fd_R));
    text += kv("fd_residual_dc", number(rep.partials.dMr_dc - fd_c));
    text += kv("delta_Mr_first_order", number(rep.delta_Mr_first_order));
    text += kv("equilibrium_channel_residual", number(equilibrium_channel_constraint(e, rates)));
    emit(opts, out, text);
    return kExitOk;
}

inline int cmd_predict(const CommonOptions& opts, std::ostream& out) {
    const ScenarioConfig cfg = load_config(opts);
    const EconomyParams e = economy(cfg, true);
    const CobbDouglas cd = cobb_douglas(cfg);
    const double h = cfg.number_or("perturbation", 0.01);
    if (h == 0.0) throw cfg.error_at("perturbation", "must be nonzero");
    SignTableSettings settings;
    settings.rate_step = cfg.number_or("rate_step", 0.01);
    settings.share_speed = cfg.number_or("share_speed", 0.1);
    settings.tolerance = opts.tolerance;
    if (!(settings.rate_step > 0.0)) throw cfg.error_at("rate_step", "degenerate scenario: rate step must be > 0");
    const PredictionReport rep = check_predictions(e, cd, h, settings);
    if (!opts.out_path.empty()) {
        emit(opts, out, report_csv(rep));
        return kExitOk;
    }
    out << format_report(rep) << "\n" << format_sign_table(rep.falls) << "\n" << format_sign_table(rep.grows);
    return kExitOk;
}

inline int cmd_adjudicate(const CommonOptions& opts, std::ostream& out) {
    const ScenarioConfig cfg = load_config(opts);
    const HyperbolicSpec spec = hyperbolic_spec(cfg);
    const EconomyParams e = economy(cfg, false);
    std::vector<double> horizons = cfg.number_list("horizons");
    if (horizons.empty()) horizons = {10.0, 100.0, 1000.0};
    for (double T : horizons)
        if (!(T >= 0.0)) throw cfg.error_at("horizons", "horizons must be >= 0");
    const double x = line_ratio(e);
    if (!(x > 0.0 && x < 1.0)) throw NumericalError("adjudicate: a + i p must lie in (0, 1)");
    const ContinuousTimeReport rep = continuous_time_adjudicator(e, spec, horizons);
    std::string text = "quantity,horizon,value,error_estimate\n";
    text += "integrand_at_zero,0," + number(rep.integrand_at_zero) + ",\n";
    for (const auto& p : rep.partials)
        text += "partial_integral," + number(p.horizon) + "," + number(p.value) + "," + number(p.error_estimate) + "\n";
    text += "candidate_limit,inf," + number(rep.candidate_limit) + ",\n";
    emit(opts, out, text);
    return kExitOk;
}

}  // namespace detail

/// Runs the tool with argv-style arguments (argv[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Present-value consumer-goods multiplier toolkit", "pvm"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonOptions opts;
    app.add_option("--config", opts.config_path, "Scenario config file (key = value lines)");
    app.add_option("--set", opts.overrides, "Override a config key: --set key=value (repeatable)")
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--out", opts.out_path, "CSV destination (default stdout)");
    app.add_option("--jobs", opts.jobs, "Parallel workers for sweep")->check(CLI::PositiveNumber);
    app.add_option("--tolerance", opts.tolerance, "Equality band for equilibrium and regime detection")
        ->check(CLI::PositiveNumber);

    std::function<int()> action;
    auto sub = [&](const char* name, const char* help, std::function<int()> fn) {
        app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
    };
    sub("multiplier", "Print M, M_r (or hyperbolic M_r), status and growth ratio", [&] { return detail::cmd_multiplier(opts, out); });
    sub("optimum", "Print the optimal-share regime (and hyperbolic roots when k is set)", [&] { return detail::cmd_optimum(opts, out); });
    sub("simulate", "Write a trajectory CSV for the configured law", [&] { return detail::cmd_simulate(opts, out, err); });
    sub("sweep", "Write one CSV row per grid point", [&] { return detail::cmd_sweep(opts, out); });
    sub("sensitivity", "Print partial derivatives and finite-difference residuals", [&] { return detail::cmd_sensitivity(opts, out); });
    sub("predict", "Print the prediction report and sign tables", [&] { return detail::cmd_predict(opts, out); });
    sub("adjudicate", "Partial continuous-time integrals vs the Ei-based limit", [&] { return detail::cmd_adjudicate(opts, out); });

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "pvm: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        err << "pvm: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "pvm: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "pvm: numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace pvm::cli
