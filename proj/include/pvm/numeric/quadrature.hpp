#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pvm::numeric {

struct QuadratureOptions {
    double abs_tol = 1e-10;  // per panel
    double rel_tol = 0.0;    // per panel, relative to the panel estimate
    int max_depth = 60;
    std::size_t max_panels = 200000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double kronrod;
    double error;
    int depth;
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = f(center);
    double kronrod = f_center * kKronrodWeights[7];
    double gauss = f_center * kGaussWeights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), depth};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b] (oriented: b < a negates).
/// A panel is accepted once its Kronrod-minus-Gauss estimate is within
/// max(abs_tol, rel_tol * |panel value|); otherwise it is bisected.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    QuadratureResult out;
    if (a == b) return out;
    const double sign = b < a ? -1.0 : 1.0;
    if (b < a) std::swap(a, b);

    std::vector<detail::Panel> pending;
    pending.push_back(detail::gauss_kronrod_15(f, a, b, 0));
    out.evaluations = 15;
    double total = 0.0;
    double error = 0.0;
    std::size_t panels = 1;
    while (!pending.empty()) {
        const detail::Panel panel = pending.back();
        pending.pop_back();
        const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(panel.kronrod));
        if (panel.error <= tol || panel.depth >= opts.max_depth || panels >= opts.max_panels) {
            if (panel.error > tol) out.converged = false;
            total += panel.kronrod;
            error += panel.error;
            continue;
        }
        const double mid = 0.5 * (panel.a + panel.b);
        pending.push_back(detail::gauss_kronrod_15(f, panel.a, mid, panel.depth + 1));
        pending.push_back(detail::gauss_kronrod_15(f, mid, panel.b, panel.depth + 1));
        out.evaluations += 30;
        panels += 1;
    }
    out.value = sign * total;
    out.error = error;
    return out;
}

}  // namespace pvm::numeric
