#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pvm/app.hpp"

using pvm::cli::ConfigError;
using pvm::cli::ScenarioConfig;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "pvm");
    std::ostringstream out, err;
    const int code = pvm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "pvm_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string value_of(const std::string& text, const std::string& key) {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);)
        if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
    return "<missing>";
}

std::string last_line(const std::string& text) {
    std::string trimmed = text;
    while (!trimmed.empty() && trimmed.back() == '\n') trimmed.pop_back();
    return trimmed.substr(trimmed.rfind('\n') + 1);
}

}  // namespace

TEST(ScenarioConfig, ParsesKeysCommentsAndBlankLines) {
    const auto cfg = ScenarioConfig::parse("# scenario\nc = 0.5\n\n p=0.2   # inline\nmodel = NetCapital\n", "s.cfg");
    EXPECT_DOUBLE_EQ(*cfg.number("c"), 0.5);
    EXPECT_DOUBLE_EQ(*cfg.number("p"), 0.2);
    EXPECT_EQ(*cfg.text("model"), "NetCapital");
    EXPECT_EQ(cfg.origin("p"), "s.cfg:4");
    EXPECT_FALSE(cfg.has("R"));
}

TEST(ScenarioConfig, ErrorsNameTheLine) {
    auto message = [](const std::string& text) {
        try {
            ScenarioConfig::parse(text, "bad.cfg");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("<no error>");
    };
    EXPECT_EQ(message("c = 0.5\nnonsense\n"), "bad.cfg:2: expected 'key = value'");
    EXPECT_EQ(message("c = 0.5\nbogus = 1\n"), "bad.cfg:2: unknown key 'bogus'");
    EXPECT_EQ(message("c = 0.5\n\nc = 0.6\n"), "bad.cfg:3: duplicate key 'c' (first set at bad.cfg:1)");
}

TEST(ScenarioConfig, BadNumberIsReportedAtItsLine) {
    const auto cfg = ScenarioConfig::parse("R = 0.05\nc = half\n", "x.cfg");
    try {
        (void)cfg.number("c");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(std::string(e.what()), "x.cfg:2: key 'c' expects a number, got 'half'");
    }
}

TEST(ScenarioConfig, OverrideWins) {
    auto cfg = ScenarioConfig::parse("c = 0.5\n", "o.cfg");
    cfg.apply_override("c=0.7", 1);
    EXPECT_DOUBLE_EQ(*cfg.number("c"), 0.7);
    EXPECT_EQ(cfg.origin("c"), "--set[1]");
    EXPECT_THROW(cfg.apply_override("c0.7", 2), ConfigError);
}

TEST(ScenarioConfig, MissingKeyExplainsWhy) {
    const auto cfg = ScenarioConfig::parse("", "m.cfg");
    try {
        cfg.require_number("k", "required when discounting = hyperbolic");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(std::string(e.what()), "m.cfg: missing required key 'k' (required when discounting = hyperbolic)");
    }
}

TEST(Cli, MultiplierAtEquilibriumPrintsOne) {
    const CliRun r = run({"multiplier", "--set", "c=0.7", "--set", "p=0.15", "--set", "n=0.1", "--set", "R=0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    // 0.15 and 0.1 + 0.05 differ in binary, so agreement is to a few ulps
    EXPECT_NEAR(std::stod(value_of(r.out, "M_r")), 1.0, 1e-15);
    EXPECT_EQ(value_of(r.out, "status"), "Convergent");
}

TEST(Cli, MultiplierReportsDivergenceAsValue) {
    const CliRun r = run({"multiplier", "--set", "c=0.5", "--set", "p=0.3", "--set", "n=0.1", "--set", "R=0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(value_of(r.out, "status"), "Divergent");
    EXPECT_EQ(value_of(r.out, "M_r"), "");
}

TEST(Cli, HyperbolicWithoutKIsConfigError) {
    const CliRun r = run({"multiplier", "--set", "c=0.5", "--set", "p=0.2", "--set", "n=0.15", "--set",
                       "discounting=hyperbolic"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("'k'"), std::string::npos) << r.err;
}

TEST(Cli, HyperbolicMultiplier) {
    const CliRun r = run({"multiplier", "--set", "c=0.5", "--set", "p=0.2", "--set", "n=0.15", "--set",
                       "discounting=hyperbolic", "--set", "k=0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(value_of(r.out, "M_r")), pvm::specfun::lerch_phi({0.95, 11.0}), 1e-10);
}

TEST(Cli, ConfigFileErrorsAreLineAnchored) {
    const auto path = scratch("bad_range.cfg");
    write_file(path, "c = 0.5\np = 0.2\nn = 1.5\nR = 0.05\n");
    const CliRun r = run({"multiplier", "--config", path.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(path.string() + ":3"), std::string::npos) << r.err;
}

TEST(Cli, UnknownSubcommandAndMissingFileAreConfigErrors) {
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"multiplier", "--config", "/nonexistent/x.cfg"}).code, 1);
}

TEST(Cli, SimulateReachesSteadyState) {
    const CliRun r = run({"simulate", "--set", "model=NetCapital", "--set", "c=0.5", "--set", "n=0.05", "--set",
                       "R=0.05", "--set", "A=1", "--set", "L=1", "--set", "b=0.5", "--set", "K0=4", "--set",
                       "horizon=10000", "--set", "dt_out=500"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,K,p,R,c,M_r,status");
    const std::string row = last_line(r.out);
    const std::string K = row.substr(row.find(',') + 1, row.find(',', row.find(',') + 1) - row.find(',') - 1);
    EXPECT_NEAR(std::stod(K), 25.0, 1e-5);
}

TEST(Cli, SimulateDivergenceIsNumericalError) {
    const CliRun r = run({"simulate", "--set", "model=MultiplierInvestment", "--set", "c=0.5", "--set", "n=0.05",
                       "--set", "R=0.05", "--set", "K0=0.5", "--set", "horizon=10"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("DivergenceRegionEntered"), std::string::npos) << r.err;
}

TEST(Cli, SweepRowsAreOrderedAndIndependentOfJobs) {
    std::vector<std::string> args{"sweep",  "--set", "c=0.5",  "--set", "p=0.2", "--set", "n=0.1",
                                  "--set",  "R=0.05", "--set", "sweep.variable=c", "--set", "sweep.from=0",
                                  "--set",  "sweep.to=1", "--set", "sweep.steps=101"};
    const CliRun one = run(args);
    args.insert(args.begin() + 1, {"--jobs", "8"});
    const CliRun many = run(args);
    ASSERT_EQ(one.code, 0) << one.err;
    ASSERT_EQ(many.code, 0) << many.err;
    EXPECT_EQ(one.out, many.out);
    EXPECT_EQ(one.out.substr(0, one.out.find('\n')), "index,c,status,M_r,dMr_dp,dMr_dR,dMr_dc,regime");
    std::istringstream lines(one.out);
    std::string line;
    std::getline(lines, line);
    for (int j = 0; std::getline(lines, line); ++j) EXPECT_EQ(line.substr(0, line.find(',')), std::to_string(j));
}

TEST(Cli, RandomSweepIsDeterministicPerSeed) {
    auto args = [](const std::string& seed, const std::string& out) {
        return std::vector<std::string>{"sweep", "--jobs", "3", "--out", out, "--set", "c=0.5", "--set", "p=0.2",
                                        "--set", "n=0.1", "--set", "R=0.05", "--set", "sweep.variable=R",
                                        "--set", "sweep.from=0.01", "--set", "sweep.to=0.3", "--set",
                                        "sweep.steps=500", "--set", "sweep.mode=random", "--set", "seed=" + seed};
    };
    const auto a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv");
    ASSERT_EQ(run(args("7", a.string())).code, 0);
    ASSERT_EQ(run(args("7", b.string())).code, 0);
    ASSERT_EQ(run(args("8", c.string())).code, 0);
    EXPECT_EQ(read_file(a), read_file(b));
    EXPECT_NE(read_file(a), read_file(c));
}

TEST(Cli, SweepRejectsInvalidEndpoint) {
    const CliRun r = run({"sweep", "--set", "c=0.5", "--set", "p=0.2", "--set", "n=0.1", "--set", "R=0.05", "--set",
                       "sweep.variable=c", "--set", "sweep.from=0", "--set", "sweep.to=1.5", "--set",
                       "sweep.steps=4"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, OptimumRegimeAndHyperbolicRoots) {
    const CliRun r = run({"optimum", "--set", "p=0.2", "--set", "n=0.1", "--set", "R=0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(value_of(r.out, "regime"), "CornerZero");
    const CliRun h = run({"optimum", "--set", "p=0.01", "--set", "n=0.2", "--set", "k=0.1"});
    ASSERT_EQ(h.code, 0) << h.err;
    EXPECT_EQ(value_of(h.out, "hyperbolic_roots"), "none");
    EXPECT_EQ(value_of(h.out, "hyperbolic_slope_sign"), "Positive");
}

TEST(Cli, SensitivityResidualsAreSmall) {
    const CliRun r = run({"sensitivity", "--set", "c=0.5", "--set", "p=0.12", "--set", "n=0.08", "--set", "R=0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* key : {"fd_residual_dp", "fd_residual_dR", "fd_residual_dc"})
        EXPECT_LT(std::abs(std::stod(value_of(r.out, key))), 1e-6) << key;
}

TEST(Cli, SensitivityOnDivergentPointIsNumericalError) {
    EXPECT_EQ(run({"sensitivity", "--set", "c=0.5", "--set", "p=0.3", "--set", "n=0.1", "--set", "R=0.05"}).code, 2);
}

TEST(Cli, PredictWritesReportCsv) {
    const auto path = scratch("report.csv");
    const CliRun r = run({"predict", "--out", path.string(), "--set", "c=0.5", "--set", "p=0.15", "--set", "n=0.1",
                       "--set", "R=0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = read_file(path);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,verdict,measured");
    EXPECT_EQ(csv.find(",Fail,"), std::string::npos) << csv;
}

TEST(Cli, AdjudicateDefaultsToThreeHorizons) {
    const CliRun r = run({"adjudicate", "--set", "c=0.5", "--set", "p=0.12", "--set", "n=0.1", "--set", "k=0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    int partials = 0;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) partials += line.rfind("partial_integral,", 0) == 0;
    EXPECT_EQ(partials, 3);
    EXPECT_NE(r.out.find("candidate_limit,inf,"), std::string::npos);
}

TEST(Cli, ToleranceWidensEquilibriumBand) {
    const std::vector<std::string> base{"--set", "p=0.1500001", "--set", "n=0.1", "--set", "R=0.05", "optimum"};
    std::vector<std::string> wide{"--tolerance", "1e-6"};
    wide.insert(wide.end(), base.begin(), base.end());
    EXPECT_EQ(value_of(run(base).out, "regime"), "CornerZero");
    EXPECT_EQ(value_of(run(wide).out, "regime"), "Interior");
}
