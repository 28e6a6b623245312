#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pvm/multiplier.hpp"
#include "pvm/series.hpp"

using namespace pvm;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

TEST(ConsumerGoodsLines, FollowGeometricRecurrence) {
    std::mt19937_64 rng(23);
    for (int j = 0; j < 200; ++j) {
        const EconomyParams e{uniform(rng, 0.05, 0.95), uniform(rng, 0.01, 0.5), uniform(rng, 0.01, 0.3), 0.05};
        const double x = e.a() + e.i() * e.p;
        const auto s = consumer_goods_lines(e, 60);
        EXPECT_NEAR(s[0], e.c * e.p, 1e-16);
        for (std::size_t t = 0; t + 1 < s.size(); ++t) EXPECT_NEAR(s[t + 1], s[t] * x, 1e-14 * s[t]);
    }
}

TEST(SeriesOracle, SingleTermIsDiscountedFirstLine) {
    const EconomyParams e{0.3, 0.25, 0.1, 0.08};
    const auto partial = series_oracle(e, DiscountSpec::exponential(), 1);
    ASSERT_EQ(partial.size(), 1u);
    EXPECT_NEAR(partial[0], e.c * e.p * e.r(), 1e-17);
}

TEST(SeriesOracle, ConvergesToClosedForm) {
    const auto two = series_oracle({0.5, 0.2, 0.1, 0.05}, DiscountSpec::exponential(), 2000);
    EXPECT_NEAR(two.back(), 2.0, 1e-12);
    const auto one = series_oracle({0.7, 0.15, 0.10, 0.05}, DiscountSpec::exponential(), 2000);
    EXPECT_NEAR(one.back(), 1.0, 1e-12);
}

TEST(SeriesOracle, PartialSumsIncrease) {
    const auto partial = series_oracle({0.5, 0.2, 0.1, 0.05}, DiscountSpec::exponential(), 100);
    for (std::size_t t = 1; t < partial.size(); ++t) EXPECT_GT(partial[t], partial[t - 1]);
}

TEST(SeriesOracle, RejectsZeroTerms) {
    EXPECT_THROW(series_oracle({0.5, 0.2, 0.1, 0.05}, DiscountSpec::exponential(), 0), std::invalid_argument);
}

TEST(SeriesSum, TailBoundIsHonest) {
    std::mt19937_64 rng(29);
    for (int j = 0; j < 300; ++j) {
        EconomyParams e{uniform(rng, 0.05, 0.95), uniform(rng, 0.01, 1.0), uniform(rng, 0.01, 0.3), uniform(rng, 0.01, 0.3)};
        if (e.r() * (e.a() + e.i() * e.p) > 0.99) continue;
        const SeriesSum s = series_sum(e, DiscountSpec::exponential(), 1e-8);
        ASSERT_FALSE(s.capped);
        const double exact = *present_multiplier(e).value;
        EXPECT_LE(exact - s.value, s.tail_bound * (1 + 1e-9) + 1e-14 * exact);
        EXPECT_GE(exact - s.value, -1e-13 * exact);
    }
}

TEST(SeriesSum, MatchesClosedFormWithinTenToTheMinusTen) {
    std::mt19937_64 rng(31);
    for (int j = 0; j < 300; ++j) {
        EconomyParams e{uniform(rng, 0.05, 0.95), uniform(rng, 0.01, 1.0), uniform(rng, 0.01, 0.3), uniform(rng, 0.01, 0.3)};
        if (e.r() * (e.a() + e.i() * e.p) > 0.99) continue;
        const double exact = *present_multiplier(e).value;
        EXPECT_NEAR(series_sum(e, DiscountSpec::exponential(), 1e-12).value, exact, 1e-10 * exact);
    }
}

TEST(SeriesSum, CapIsReportedForDivergentSeries) {
    const SeriesSum s = series_sum({0.5, 0.3, 0.1, 0.05}, DiscountSpec::exponential(), 1e-10, 1000);
    EXPECT_TRUE(s.capped);
    EXPECT_EQ(s.terms, 1000u);
}

TEST(SeriesSum, ZeroShareSumsToZero) {
    const SeriesSum s = series_sum({0.0, 0.2, 0.1, 0.05}, DiscountSpec::exponential(), 1e-10);
    EXPECT_DOUBLE_EQ(s.value, 0.0);
    EXPECT_FALSE(s.capped);
}

TEST(SeriesSum, UndiscountedLimitMatchesFutureMultiplier) {
    // R -> 0 drives the present form toward the undiscounted one
    const EconomyParams e{0.5, 0.2, 0.15, 1e-9};
    EXPECT_NEAR(series_sum(e, DiscountSpec::exponential(), 1e-12).value, *future_multiplier(e).value, 1e-6);
}
