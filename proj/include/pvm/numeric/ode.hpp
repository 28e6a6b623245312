#pragma once

// Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

namespace pvm::numeric {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeSettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 selects a step from the initial slope
    double min_step = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

enum class OdeStatus {
    Completed,          // reached t_end
    StoppedByObserver,  // observer asked to stop
    StepUnderflow,      // step fell below min_step
    MaxStepsExceeded,
};

template <std::size_t N>
struct OdeResult {
    OdeStatus status = OdeStatus::Completed;
    double t = 0.0;
    State<N> y{};
    long accepted = 0;
    long rejected = 0;
    // true when the last rejection came from the right-hand side refusing a
    // stage state (outside the model domain) rather than from the error test
    bool domain_rejection = false;
};

/// Continuous extension of one accepted step, valid on [t0, t0 + h].
template <std::size_t N>
class DenseStep {
public:
    double t_begin() const { return t0_; }
    double t_end() const { return t0_ + h_; }
    const State<N>& y_begin() const { return coeff_[0]; }
    const State<N>& y_end() const { return y1_; }

    State<N> operator()(double t) const {
        const double theta = (t - t0_) / h_;
        const double theta1 = 1.0 - theta;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = coeff_[0][i] +
                   theta * (coeff_[1][i] +
                            theta1 * (coeff_[2][i] + theta * (coeff_[3][i] + theta1 * coeff_[4][i])));
        }
        return y;
    }

private:
    template <std::size_t M, class Rhs, class Observer>
    friend OdeResult<M> integrate(Rhs&&, double, const State<M>&, double, const OdeSettings&,
                                  Observer&&);

    double t0_ = 0.0;
    double h_ = 0.0;
    std::array<State<N>, 5> coeff_{};
    State<N> y1_{};
};

namespace detail {

// Butcher tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output (Hairer & Wanner, DOPRI5)
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
bool all_finite(const State<N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t_end.
///
/// `rhs(t, y)` returns std::optional<State<N>>; nullopt marks a stage state
/// the model cannot evaluate, which rejects the step and shrinks it.
/// `observer(const DenseStep<N>&)` is called after every accepted step and
/// returns false to stop integration.
template <std::size_t N, class Rhs, class Observer>
OdeResult<N> integrate(Rhs&& rhs, double t0, const State<N>& y0, double t_end,
                       const OdeSettings& settings, Observer&& observer) {
    using namespace detail;
    OdeResult<N> result;
    result.t = t0;
    result.y = y0;
    if (t_end <= t0) return result;

    auto eval = [&](double t, const State<N>& y, State<N>& out) -> bool {
        if (!all_finite(y)) return false;
        std::optional<State<N>> f = rhs(t, y);
        if (!f || !all_finite(*f)) return false;
        out = *f;
        return true;
    };

    State<N> k1;
    if (!eval(t0, y0, k1)) {
        result.status = OdeStatus::StepUnderflow;
        result.domain_rejection = true;
        return result;
    }

    const double span = t_end - t0;
    double h = settings.initial_step;
    if (h <= 0.0) {
        double ny = 0.0, nf = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = settings.abs_tol + settings.rel_tol * std::abs(y0[i]);
            ny += (y0[i] / sc) * (y0[i] / sc);
            nf += (k1[i] / sc) * (k1[i] / sc);
        }
        ny = std::sqrt(ny / N);
        nf = std::sqrt(nf / N);
        h = (ny < 1e-5 || nf < 1e-5) ? 1e-6 : 0.01 * ny / nf;
    }
    h = std::min({h, span, settings.max_step});

    double t = t0;
    State<N> y = y0;
    State<N> k2, k3, k4, k5, k6, k7, ytmp, y1;
    bool last_rejected = false;

    while (t < t_end) {
        if (result.accepted + result.rejected >= settings.max_steps) {
            result.status = OdeStatus::MaxStepsExceeded;
            break;
        }
        if (h < settings.min_step) {
            result.status = OdeStatus::StepUnderflow;
            break;
        }
        bool final_step = false;
        if (t + h >= t_end) {
            h = t_end - t;
            final_step = true;
        }

        bool stage_ok = true;
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        stage_ok = stage_ok && eval(t + c2 * h, ytmp, k2);
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            stage_ok = eval(t + c3 * h, ytmp, k3);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            stage_ok = eval(t + c4 * h, ytmp, k4);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            stage_ok = eval(t + c5 * h, ytmp, k5);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                      a65 * k5[i]);
            stage_ok = eval(t + h, ytmp, k6);
        }
        if (stage_ok) {
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                    a76 * k6[i]);
            stage_ok = eval(t + h, y1, k7);
        }
        if (!stage_ok) {
            ++result.rejected;
            result.domain_rejection = true;
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = settings.abs_tol +
                              settings.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);

        if (err > 1.0 || !std::isfinite(err)) {
            ++result.rejected;
            result.domain_rejection = false;
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= std::min(1.0, fac);
            last_rejected = true;
            continue;
        }

        DenseStep<N> step;
        step.t0_ = t;
        step.h_ = h;
        step.y1_ = y1;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = y1[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            step.coeff_[0][i] = y[i];
            step.coeff_[1][i] = ydiff;
            step.coeff_[2][i] = bspl;
            step.coeff_[3][i] = ydiff - h * k7[i] - bspl;
            step.coeff_[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
        }

        ++result.accepted;
        result.domain_rejection = false;
        t = final_step ? t_end : t + h;
        y = y1;
        k1 = k7;
        result.t = t;
        result.y = y;

        if (!observer(static_cast<const DenseStep<N>&>(step))) {
            result.status = OdeStatus::StoppedByObserver;
            return result;
        }

        double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        h = std::min(h * fac, settings.max_step);
        last_rejected = false;
    }
    return result;
}

/// Convenience overload without an observer.
template <std::size_t N, class Rhs>
OdeResult<N> integrate(Rhs&& rhs, double t0, const State<N>& y0, double t_end,
                       const OdeSettings& settings = {}) {
    return integrate<N>(std::forward<Rhs>(rhs), t0, y0, t_end, settings,
                        [](const DenseStep<N>&) { return true; });
}

}  // namespace pvm::numeric
