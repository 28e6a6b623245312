#pragma once

// Brute-force consumer-goods series. The lines are produced by explicit
// two-sector capital bookkeeping rather than from the closed geometric form,
// so the partial sums are an independent check of the multiplier formulas.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pvm/economy.hpp"
#include "pvm/numeric/summation.hpp"

namespace pvm {

inline constexpr std::size_t kSeriesTermCap = 10'000'000;

/// Generates consumer-goods output lines S_1..S_count for one unit of capital.
///
/// Capital sits in two sectors. Each period the consumer sector produces
/// p K_c of consumer goods, the producer sector produces p K_m of new capital
/// which is split c : i between the sectors, and both stocks depreciate by a.
class ConsumerGoodsLines {
public:
    explicit ConsumerGoodsLines(const EconomyParams& e)
        : c_(e.c), p_(e.p), a_(e.a()), consumer_stock_(e.c), producer_stock_(e.i()) {}

    /// Output of the current period, then advance one period.
    double next() {
        const double line = p_ * consumer_stock_;
        const double new_capital = p_ * producer_stock_;
        consumer_stock_ = a_ * consumer_stock_ + c_ * new_capital;
        producer_stock_ = a_ * producer_stock_ + (1.0 - c_) * new_capital;
        return line;
    }

private:
    double c_, p_, a_;
    double consumer_stock_;
    double producer_stock_;
};

inline std::vector<double> consumer_goods_lines(const EconomyParams& e, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    ConsumerGoodsLines gen(e);
    for (std::size_t t = 0; t < count; ++t) out.push_back(gen.next());
    return out;
}

namespace detail {

// Discount weight applied to period t (t >= 1), advanced incrementally.
class DiscountWeights {
public:
    DiscountWeights(const EconomyParams& e, const DiscountSpec& d) : spec_(d), r_(e.r()) {}

    double next() {
        ++t_;
        if (spec_.kind == DiscountKind::Hyperbolic) return 1.0 / (1.0 + spec_.k * static_cast<double>(t_));
        exp_weight_ *= r_;
        return exp_weight_;
    }

    // Upper bound on sum_{t > terms} of the discounted lines, given the
    // undiscounted line ratio x and the already generated line S_{terms}.
    double tail_bound(double last_line, double x) const {
        const double next_line = last_line * x;
        if (spec_.kind == DiscountKind::Hyperbolic) {
            if (!(x < 1.0)) return INFINITY;
            return next_line / ((1.0 + spec_.k * static_cast<double>(t_ + 1)) * (1.0 - x));
        }
        const double q = r_ * x;
        if (!(q < 1.0)) return INFINITY;
        return next_line * exp_weight_ * r_ / (1.0 - q);
    }

private:
    DiscountSpec spec_;
    double r_;
    double exp_weight_ = 1.0;
    std::size_t t_ = 0;
};

}  // namespace detail

/// Partial sums of the discounted consumer-goods series, one entry per term.
inline std::vector<double> series_oracle(const EconomyParams& e, const DiscountSpec& discount,
                                         std::size_t num_terms) {
    if (num_terms == 0) throw std::invalid_argument("series_oracle: num_terms must be >= 1");
    std::vector<double> partial;
    partial.reserve(num_terms);
    ConsumerGoodsLines lines(e);
    detail::DiscountWeights weights(e, discount);
    numeric::CompensatedSum sum;
    for (std::size_t t = 0; t < num_terms; ++t) {
        sum += lines.next() * weights.next();
        partial.push_back(sum.value());
    }
    return partial;
}

struct SeriesSum {
    double value = 0.0;
    std::size_t terms = 0;
    double tail_bound = 0.0;
    bool capped = false;  // hit the term cap before the bound met epsilon
};

/// Sums until the analytic geometric tail bound is <= epsilon * |partial sum|
/// (or zero), or until `max_terms` terms have been added.
inline SeriesSum series_sum(const EconomyParams& e, const DiscountSpec& discount, double epsilon,
                            std::size_t max_terms = kSeriesTermCap) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("series_sum: epsilon must be > 0");
    const double x = e.a() + e.i() * e.p;
    ConsumerGoodsLines lines(e);
    detail::DiscountWeights weights(e, discount);
    numeric::CompensatedSum sum;
    SeriesSum out;
    if (e.c == 0.0) return {0.0, 1, 0.0, false};  // consumer stock stays at zero
    for (std::size_t t = 1; t <= max_terms; ++t) {
        const double line = lines.next();
        sum += line * weights.next();
        out.terms = t;
        out.tail_bound = weights.tail_bound(line, x);
        if (out.tail_bound <= epsilon * std::abs(sum.value())) break;
    }
    out.value = sum.value();
    out.capped = !(out.tail_bound <= epsilon * std::abs(out.value));
    return out;
}

}  // namespace pvm
