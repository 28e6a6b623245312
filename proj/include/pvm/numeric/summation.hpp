#pragma once

#include <cmath>

namespace pvm::numeric {

// Neumaier's variant of Kahan summation. Accurate for terms of either sign,
// including when a new term is larger than the running sum.
class CompensatedSum {
public:
    constexpr CompensatedSum() = default;
    explicit constexpr CompensatedSum(double initial) : sum_(initial) {}

    constexpr CompensatedSum& operator+=(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    constexpr double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

}  // namespace pvm::numeric
