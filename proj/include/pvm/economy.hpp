#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace pvm {

/// Absolute band used wherever an exact equality (p = R + n, M_r = 1, ...)
/// has to be decided in floating point.
inline constexpr double kDefaultEqualityTolerance = 1e-9;

/// Parameter tuple shared by every multiplier formula.
///
///   c  share of each period's investment going to consumer-goods production
///   p  marginal productivity of capital (per period)
///   n  depreciation rate (per period)
///   R  discount rate (per period)
///
/// The derived quantities a = 1 - n, i = 1 - c and r = 1 / (1 + R) are
/// computed on demand so they can never drift from the primaries.
struct EconomyParams {
    double c = 0.0;
    double p = 0.0;
    double n = 0.0;
    double R = 0.0;

    constexpr double a() const { return 1.0 - n; }
    constexpr double i() const { return 1.0 - c; }
    constexpr double r() const { return 1.0 / (1.0 + R); }

    /// Returns an empty string when valid, otherwise a description of the
    /// first violated constraint.
    std::string violation() const {
        if (!(c >= 0.0 && c <= 1.0)) return "c must lie in [0, 1]";
        if (!(p >= 0.0) || !std::isfinite(p)) return "p must be finite and >= 0";
        if (!(n > 0.0 && n < 1.0)) return "n must lie in (0, 1)";
        if (!(R > 0.0) || !std::isfinite(R)) return "R must be finite and > 0";
        return {};
    }

    bool valid() const { return violation().empty(); }

    /// Constructs and validates; throws std::invalid_argument on bad input.
    static EconomyParams make(double c, double p, double n, double R) {
        EconomyParams params{c, p, n, R};
        if (auto why = params.violation(); !why.empty()) throw std::invalid_argument(why);
        return params;
    }

    friend constexpr bool operator==(const EconomyParams&, const EconomyParams&) = default;
};

enum class DiscountKind { Exponential, Hyperbolic };

/// Discounting selector: exponential at the parameter tuple's R, or
/// hyperbolic 1 / (1 + k t) with coefficient k.
struct DiscountSpec {
    DiscountKind kind = DiscountKind::Exponential;
    double k = 0.0;

    static constexpr DiscountSpec exponential() { return {DiscountKind::Exponential, 0.0}; }
    static DiscountSpec hyperbolic(double k) {
        if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be finite and > 0");
        return {DiscountKind::Hyperbolic, k};
    }
};

enum class Convergence { Convergent, Divergent };

inline const char* to_string(Convergence s) {
    return s == Convergence::Convergent ? "Convergent" : "Divergent";
}

/// Outcome of summing a geometric-type series. Divergence is a value, not an
/// error: `value` is empty exactly when `status` is Divergent.
struct MultiplierResult {
    Convergence status = Convergence::Divergent;
    std::optional<double> value;
    double growth_ratio = 0.0;

    bool convergent() const { return status == Convergence::Convergent; }

    static MultiplierResult convergent_with(double value, double ratio) {
        return {Convergence::Convergent, value, ratio};
    }
    static MultiplierResult divergent_with(double ratio) {
        return {Convergence::Divergent, std::nullopt, ratio};
    }
};

enum class ShareRegime { CornerZero, Interior, CornerOne };

inline const char* to_string(ShareRegime r) {
    switch (r) {
        case ShareRegime::CornerZero: return "CornerZero";
        case ShareRegime::Interior: return "Interior";
        case ShareRegime::CornerOne: return "CornerOne";
    }
    return "?";
}

struct ShareOptimum {
    ShareRegime regime = ShareRegime::Interior;
    double discriminant = 0.0;  // 1 - r a - r p
};

/// Today's wealth W split between consumption and capital, valued at M_r.
struct ChoiceProblem {
    double wealth = 0.0;
    double multiplier = 0.0;
};

enum class ChoiceKind { InvestAll, ConsumeAll, Indifferent };

/// Allocation of wealth. For Indifferent every K in [invested_min,
/// invested_max] = [0, W] is optimal; otherwise the two bounds coincide.
struct ChoiceAllocation {
    ChoiceKind kind = ChoiceKind::Indifferent;
    double wealth = 0.0;
    double invested_min = 0.0;
    double invested_max = 0.0;

    double invested() const { return invested_min; }
    double consumption() const { return wealth - invested_min; }
    bool is_range() const { return invested_min != invested_max; }
};

}  // namespace pvm
