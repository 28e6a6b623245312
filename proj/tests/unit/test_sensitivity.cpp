#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pvm/sensitivity.hpp"

using namespace pvm;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

EconomyParams random_convergent(std::mt19937_64& rng) {
    for (;;) {
        EconomyParams e{uniform(rng, 0.05, 0.95), uniform(rng, 0.001, 1.0), uniform(rng, 0.01, 0.3),
                        uniform(rng, 0.001, 0.3)};
        if (e.r() * line_ratio(e) <= 0.9) return e;
    }
}

double mr(const EconomyParams& e) { return *present_multiplier(e).value; }

double central(const EconomyParams& e, double EconomyParams::*field, double h = 1e-6) {
    EconomyParams up = e, dn = e;
    up.*field += h;
    dn.*field -= h;
    return (mr(up) - mr(dn)) / (2 * h);
}

}  // namespace

TEST(Partials, ExamplePointMatchesCentralDifferences) {
    const EconomyParams e{0.5, 0.12, 0.08, 0.05};
    const Partials g = partials(e);
    EXPECT_NEAR(g.dMr_dp, central(e, &EconomyParams::p), 1e-6 * std::abs(g.dMr_dp));
    EXPECT_NEAR(g.dMr_dR, central(e, &EconomyParams::R), 1e-6 * std::abs(g.dMr_dR));
    EXPECT_NEAR(g.dMr_dc, central(e, &EconomyParams::c), 1e-6 * std::abs(g.dMr_dc));
}

TEST(Partials, MatchLiteralDiscountedForms) {
    // with D = 1 - r a - r p + r p c
    std::mt19937_64 rng(53);
    for (int j = 0; j < 500; ++j) {
        const EconomyParams e = random_convergent(rng);
        const double r = e.r(), a = e.a();
        const double D = 1 - r * a - r * e.p + r * e.p * e.c;
        const Partials g = partials(e);
        EXPECT_NEAR(g.dMr_dp, e.c * r * (1 - r * a) / (D * D), 1e-9 * std::abs(g.dMr_dp));
        EXPECT_NEAR(g.dMr_dR, -e.c * e.p / ((1 + e.R) * (1 + e.R) * D * D), 1e-9 * std::abs(g.dMr_dR));
        EXPECT_NEAR(g.dMr_dc, e.p * r * (1 - r * a - r * e.p) / (D * D), 1e-9 * std::abs(g.dMr_dp));
    }
}

TEST(Partials, RateDerivativeIsNegativeAndShareSignFollowsGap) {
    std::mt19937_64 rng(59);
    for (int j = 0; j < 1000; ++j) {
        const EconomyParams e = random_convergent(rng);
        const Partials g = partials(e);
        EXPECT_LT(g.dMr_dR, 0.0);
        const double gap = e.R + e.n - e.p;
        EXPECT_EQ(g.dMr_dc > 0.0, gap > 0.0);
    }
}

TEST(Partials, ShareDerivativeVanishesAtEquilibrium) {
    EXPECT_EQ(partials({0.3, 0.05 + 0.1, 0.1, 0.05}).dMr_dc, 0.0);
}

TEST(Partials, RejectDivergentInput) {
    EXPECT_THROW(partials({0.5, 0.3, 0.1, 0.05}), std::domain_error);
}

TEST(DeltaMr, ZeroRatesPredictNoChange) {
    EXPECT_DOUBLE_EQ(delta_Mr({0.5, 0.2, 0.1, 0.05}, {0.0, 0.0}, 1.0), 0.0);
}

TEST(DeltaMr, RemainderIsSecondOrder) {
    std::mt19937_64 rng(61);
    for (int j = 0; j < 50; ++j) {
        const EconomyParams e = random_convergent(rng);
        const ChannelRates rates{uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05)};
        auto remainder = [&](double dt) {
            const EconomyParams moved{e.c, e.p + rates.dp_dt * dt, e.n, e.R + rates.dR_dt * dt};
            return std::abs(mr(moved) - mr(e) - delta_Mr(e, rates, dt));
        };
        const double ratio = remainder(0.1) / remainder(0.05);
        EXPECT_GE(ratio, 3.5);
        EXPECT_LE(ratio, 4.5);
    }
}

TEST(EquilibriumChannel, NullDirectionGivesZero) {
    const EconomyParams e{0.5, 0.2, 0.1, 0.05};
    const Partials g = partials(e);
    const double dR = 0.01;
    const ChannelRates rates{dR * (-g.dMr_dR / g.dMr_dp), dR};
    EXPECT_NEAR(equilibrium_channel_constraint(e, rates), 0.0, 1e-15);
}

TEST(EquilibriumChannel, ProductivityAloneRaisesTheMultiplier) {
    EXPECT_GT(equilibrium_channel_constraint({0.5, 0.2, 0.1, 0.05}, {1.0, 0.0}), 0.0);
}

TEST(EquilibriumChannel, CoMovementAtEquilibriumKeepsMultiplierAtOne) {
    // joint adjustment moves p and R in opposite directions; at its fixed point
    // the rates are zero, and along dp = dR the multiplier stays at 1
    const EconomyParams e{0.4, 0.15, 0.1, 0.05};
    EXPECT_NEAR(equilibrium_channel_constraint(e, {0.0, 0.0}), 0.0, 1e-18);
    EXPECT_NEAR(equilibrium_channel_constraint(e, {0.02, 0.02}), 0.0, 1e-14);
}

TEST(ExtendedDeltaMr, ReducesToTwoChannelFormAtEquilibrium) {
    std::mt19937_64 rng(67);
    for (int j = 0; j < 200; ++j) {
        EconomyParams e{uniform(rng, 0.05, 0.95), 0.0, uniform(rng, 0.01, 0.3), uniform(rng, 0.001, 0.3)};
        e.p = e.R + e.n;
        const ChannelRates rates{uniform(rng, -1, 1), uniform(rng, -1, 1)};
        const ShareChannel share{uniform(rng, -1, 1), uniform(rng, -1, 1)};
        EXPECT_EQ(extended_delta_Mr(e, rates, share, 0.3), delta_Mr(e, rates, 0.3));
    }
}

TEST(ExtendedDeltaMr, ZeroShareChannelEqualsTwoChannelForm) {
    const EconomyParams e{0.5, 0.2, 0.1, 0.05};
    const ChannelRates rates{0.01, -0.02};
    EXPECT_DOUBLE_EQ(extended_delta_Mr(e, rates, {0.0, 0.0}, 2.0), delta_Mr(e, rates, 2.0));
}

TEST(ExtendedDeltaMr, ShareTermIsAddedAtGenericPoint) {
    const EconomyParams e{0.5, 0.2, 0.1, 0.05};
    const ChannelRates rates{0.01, -0.02};
    const ShareChannel share{-0.4, 0.7};
    const double dt = 0.5;
    const double dc = central(e, &EconomyParams::c);
    const double expected = delta_Mr(e, rates, dt) + dc * (share.dc_dp * rates.dp_dt + share.dc_dR * rates.dR_dt) * dt;
    EXPECT_NEAR(extended_delta_Mr(e, rates, share, dt), expected, 1e-8);
}

TEST(SensitivityReport, BundlesPartialsAndPrediction) {
    const EconomyParams e{0.5, 0.2, 0.1, 0.05};
    const auto rep = sensitivity_report(e, {0.01, 0.0}, 1.0);
    EXPECT_DOUBLE_EQ(rep.partials.dMr_dp, partials(e).dMr_dp);
    EXPECT_DOUBLE_EQ(rep.delta_Mr_first_order, delta_Mr(e, {0.01, 0.0}, 1.0));
}

TEST(ConsumerInvestmentSign, Examples) {
    EXPECT_EQ(consumer_investment_sign(0.3, -0.1), InvestmentSign::NonNegative);
    EXPECT_EQ(consumer_investment_sign(0.1, -0.3), InvestmentSign::Negative);
    EXPECT_EQ(consumer_investment_sign(0.2, -0.2), InvestmentSign::Boundary);
}
