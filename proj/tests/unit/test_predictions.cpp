#include <gtest/gtest.h>

#include <string>

#include "pvm/predictions.hpp"

using namespace pvm;

namespace {

const EconomyParams kBase{0.5, 0.15, 0.1, 0.05};
const CobbDouglas kCd{};

const PredictionCheck& find(const PredictionReport& rep, const std::string& id) {
    for (const auto& c : rep.checks)
        if (c.id == id) return c;
    throw std::runtime_error("no check " + id);
}

}  // namespace

TEST(SignTable, RateFallsPattern) {
    const SignTable t = sign_table(Scenario::RFalls, kBase, kCd);
    EXPECT_EQ(t[Quantity::Investment], Sign::Plus);
    EXPECT_EQ(t[Quantity::ShareC], Sign::Minus);
    EXPECT_EQ(t[Quantity::ShareI], Sign::Plus);
    EXPECT_EQ(t[Quantity::GrowthRateInvC], Sign::NA);
    EXPECT_EQ(t[Quantity::GrowthRateInvI], Sign::Plus);
}

TEST(SignTable, RateGrowsPattern) {
    const SignTable t = sign_table(Scenario::RGrows, kBase, kCd);
    EXPECT_EQ(t[Quantity::Investment], Sign::Minus);
    EXPECT_EQ(t[Quantity::ShareC], Sign::Plus);
    EXPECT_EQ(t[Quantity::ShareI], Sign::Minus);
    EXPECT_EQ(t[Quantity::GrowthRateInvC], Sign::NA);
    EXPECT_EQ(t[Quantity::GrowthRateInvI], Sign::Minus);
}

TEST(SignTable, ScenariosAreAntisymmetric) {
    for (double R : {0.03, 0.05, 0.1}) {
        const EconomyParams base{0.5, R + 0.1, 0.1, R};
        const SignTable f = sign_table(Scenario::RFalls, base, kCd);
        const SignTable g = sign_table(Scenario::RGrows, base, kCd);
        for (std::size_t j = 0; j < f.entries.size(); ++j) EXPECT_EQ(g.entries[j], flip(f.entries[j]));
    }
}

TEST(SignTable, ShareEntriesAreOpposite) {
    const SignTable t = sign_table(Scenario::RFalls, kBase, kCd);
    EXPECT_EQ(t[Quantity::ShareI], flip(t[Quantity::ShareC]));
}

TEST(SignTable, ZeroStepIsRejectedAsDegenerate) {
    SignTableSettings s;
    s.rate_step = 0.0;
    try {
        sign_table(Scenario::RFalls, kBase, kCd, s);
        FAIL() << "expected rejection";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("degenerate"), std::string::npos);
    }
}

TEST(SignTable, AnyPositiveShareSpeedGivesSamePattern) {
    const SignTable ref = sign_table(Scenario::RFalls, kBase, kCd);
    for (double eta : {0.01, 0.5}) {
        SignTableSettings s;
        s.share_speed = eta;
        EXPECT_EQ(sign_table(Scenario::RFalls, kBase, kCd, s).entries, ref.entries) << "eta " << eta;
    }
}

TEST(CheckPredictions, AllTestablePredictionsPass) {
    const PredictionReport rep = check_predictions(kBase, kCd, 0.01);
    EXPECT_TRUE(rep.all_testable_pass()) << format_report(rep);
    for (int j = 1; j <= 11; ++j) EXPECT_EQ(find(rep, std::to_string(j)).verdict, Verdict::Pass) << j;
    EXPECT_EQ(find(rep, "RFalls.GrowthRateInvC").verdict, Verdict::Untestable);
}

TEST(CheckPredictions, CornerPredictionReportsRegime) {
    const PredictionReport rep = check_predictions({0.5, 0.2, 0.1, 0.05}, kCd, 0.01);
    EXPECT_NE(find(rep, "5").measured.find("CornerZero"), std::string::npos);
}

TEST(CheckPredictions, LowerRateRaisesMultiplier) {
    EXPECT_GT(*present_multiplier({0.5, 0.2, 0.1, 0.04}).value, *present_multiplier({0.5, 0.2, 0.1, 0.05}).value);
    const PredictionReport rep = check_predictions({0.5, 0.2, 0.1, 0.05}, kCd, 0.01);
    EXPECT_EQ(find(rep, "2").verdict, Verdict::Pass);
}

TEST(CheckPredictions, DeterministicAcrossRuns) {
    EXPECT_EQ(report_csv(check_predictions(kBase, kCd, 0.01)), report_csv(check_predictions(kBase, kCd, 0.01)));
}

TEST(CheckPredictions, RejectsZeroPerturbationAndDivergentBase) {
    EXPECT_THROW(check_predictions(kBase, kCd, 0.0), std::invalid_argument);
    EXPECT_THROW(check_predictions({0.5, 0.3, 0.1, 0.05}, kCd, 0.01), std::domain_error);
}

TEST(Formatting, TableLayoutAndCsv) {
    const SignTable t = sign_table(Scenario::RFalls, kBase, kCd);
    const std::string text = format_sign_table(t);
    EXPECT_NE(text.find("Predictions if discount rate R falls"), std::string::npos);
    EXPECT_NE(text.find("Multiplier model"), std::string::npos);
    EXPECT_EQ(sign_table_csv(t),
              "scenario,quantity,sign\nRFalls,Investment,+\nRFalls,ShareC,-\nRFalls,ShareI,+\n"
              "RFalls,GrowthRateInvC,NA\nRFalls,GrowthRateInvI,+\n");
}
