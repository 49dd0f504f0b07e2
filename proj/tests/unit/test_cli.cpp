#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "ehsim/channel.hpp"
#include "ehsim/commands.hpp"
#include "ehsim/csv.hpp"
#include "ehsim/diagnostics.hpp"
#include "ehsim/errors.hpp"

using namespace ehsim;
namespace fs = std::filesystem;

namespace {

struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted && c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
            out.back() += '"';
            ++i;
        } else if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

Table read_table(const fs::path& path) {
    std::ifstream in(path);
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with('#')) {
            t.comments.push_back(line);
        } else if (t.header.empty()) {
            t.header = split(line);
        } else {
            const auto f = split(line);
            std::map<std::string, std::string> row;
            for (std::size_t i = 0; i < t.header.size() && i < f.size(); ++i) row[t.header[i]] = f[i];
            t.rows.push_back(row);
        }
    }
    return t;
}

double num(const std::string& s) { return std::stod(s); }

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("ehsim_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        opts_.out_dir = dir_ / "out";
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

    fs::path dir_;
    CommandOptions opts_;
    ScopedWarningSink quiet_{nullptr};
};

const char* kZeroVariance = R"({"M": 20, "horizon": 100000, "seed": 3,
  "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 0},
  "policy": {"kind": "constant", "draw": 10}, "n_replications": 2})";

}  // namespace

TEST_F(Cli, SimulateZeroVarianceHasNoDischarge) {
    const auto r = cmd_simulate(write("zero.json", kZeroVariance), opts_);
    EXPECT_EQ(r.exit_code, 0);
    const auto t = read_table(opts_.out_dir / "simulate.csv");
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].at("p_discharge"), "0.00000e+00");
    EXPECT_EQ(t.rows[0].at("seed"), "3");
}

TEST_F(Cli, NegativeBatteryIsRejectedWithFieldAndLine) {
    const auto cfg = write("bad.json", "{\n  \"M\": -5,\n  \"replenishment\": {\"kind\": \"poisson\", \"mean\": 3},\n"
                                       "  \"policy\": {\"kind\": \"constant\", \"draw\": 2}\n}\n");
    try {
        cmd_simulate(cfg, opts_);
        FAIL() << "expected a configuration error";
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), 2);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("'M'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("bad.json:2"), std::string::npos) << msg;
    }
}

TEST_F(Cli, UnknownFieldAndSyntaxErrorsAreLocated) {
    const auto typo = write("typo.json", "{\"M\": 10,\n \"horizn\": 5,\n \"replenishment\": {\"kind\": \"poisson\", "
                                         "\"mean\": 3}, \"policy\": {\"kind\": \"constant\"}}");
    try {
        cmd_simulate(typo, opts_);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("horizn"), std::string::npos) << e.what();
    }
    const auto broken = write("broken.json", "{\"M\": 10,\n \"horizon\": ,\n}");
    try {
        cmd_simulate(broken, opts_);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("broken.json:2:"), std::string::npos) << e.what();
    }
}

TEST_F(Cli, UnstableJointConfigNamesTheCondition) {
    // C(10) = log2(11) ~ 3.46 < 4
    const auto cfg = write("unstable.json", R"({"mode": "joint", "M": 40, "K": 20,
      "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 4},
      "arrivals": {"kind": "iid-gaussian", "mean": 4, "variance": 1},
      "policy": {"kind": "scheme-q", "beta_q": 2}})");
    try {
        cmd_simulate(cfg, opts_);
        FAIL() << "expected a stability error";
    } catch (const StabilityError& e) {
        EXPECT_NE(std::string(e.what()).find("lambda < C(mu)"), std::string::npos) << e.what();
        EXPECT_EQ(exit_code_for(e), 2);
    }
}

TEST_F(Cli, SweepOverBatterySizeForSchemeB) {
    const auto spec = write("b.json", R"({"name": "b", "n_replications": 2,
      "base": {"horizon": 20000, "seed": 5, "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 1}},
      "policies": [{"kind": "scheme-b", "beta": 2}],
      "sweep": {"axis": "M", "values": [50, 100, 200, 400, 800]}})");
    const auto r = cmd_sweep(spec, opts_);
    ASSERT_EQ(r.files.size(), 3u);
    const auto t = read_table(opts_.out_dir / "b_sweep.csv");
    ASSERT_EQ(t.rows.size(), 5u);
    for (const auto& row : t.rows) {
        const double M = num(row.at("M"));
        // exp(s* M / 2) with s* = -2 delta / sigma^2 and delta = 2 ln M / M gives M^-2.
        EXPECT_NEAR(num(row.at("theory_discharge")) * M * M, 1.0, 1e-5);
        EXPECT_EQ(row.at("theory_discharge_model"), "polynomial");
        EXPECT_EQ(row.at("theory_loss"), "");
    }
    EXPECT_TRUE(fs::exists(opts_.out_dir / "b_fits.csv"));
    std::ifstream gp(opts_.out_dir / "b_sweep.gp");
    const std::string script((std::istreambuf_iterator<char>(gp)), std::istreambuf_iterator<char>());
    EXPECT_NE(script.find("yerrorbars"), std::string::npos);
    EXPECT_NE(script.find("b_sweep.csv"), std::string::npos);
}

TEST_F(Cli, EmptyPolicyListIsRejected) {
    const auto spec = write("empty.json", R"({"name": "e",
      "base": {"replenishment": {"kind": "poisson", "mean": 3}},
      "policies": [], "sweep": {"axis": "M", "values": [10, 20]}})");
    try {
        cmd_sweep(spec, opts_);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("policies"), std::string::npos) << e.what();
    }
}

TEST_F(Cli, RhoSweepSetsArrivalRateFromCapacity) {
    const auto spec = write("rho.json", R"({"name": "rho", "n_replications": 2,
      "base": {"mode": "joint", "M": 60, "K": 40, "horizon": 20000,
               "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 4},
               "arrivals": {"kind": "poisson", "mean": 1}},
      "policies": [{"kind": "scheme-q"}, {"kind": "scheme-e", "delta_r": 0.5}],
      "sweep": {"axis": "rho", "values": [0.3, 0.5, 0.7]}})");
    cmd_sweep(spec, opts_);
    const auto t = read_table(opts_.out_dir / "rho_sweep.csv");
    ASSERT_EQ(t.rows.size(), 6u);
    const double cap = awgn_rate(10.0, 1.0);
    for (const auto& row : t.rows) {
        EXPECT_NEAR(num(row.at("lambda")), num(row.at("value")) * cap, 1e-8);
        if (row.at("policy") == "scheme-q") EXPECT_EQ(row.at("theory_loss_model"), "polynomial");
        if (row.at("policy") == "scheme-e") EXPECT_EQ(row.at("theory_loss_model"), "exponential");
    }
}

TEST_F(Cli, SweepRecordsFailedCellsAndContinues) {
    const auto spec = write("fail.json", R"({"name": "f", "n_replications": 2,
      "base": {"horizon": 10000, "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 1}},
      "policies": [{"kind": "scheme-b"}],
      "sweep": {"axis": "M", "values": [1, 50]}})");
    cmd_sweep(spec, opts_);
    const auto t = read_table(opts_.out_dir / "f_sweep.csv");
    EXPECT_EQ(t.rows.size(), 1u);
    bool recorded = false;
    for (const auto& c : t.comments) recorded |= c.find("failed cell") != std::string::npos;
    EXPECT_TRUE(recorded);
}

TEST_F(Cli, TradeoffCurveAndOperatingPoint) {
    const auto spec = write("t.json", R"({"name": "t", "n_grid": 50, "n_replications": 2,
      "base": {"mode": "joint", "horizon": 4000000, "seed": 9,
               "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 4},
               "arrivals": {"kind": "iid-gaussian", "mean": 2, "variance": 1}},
      "operating_points": [1.0], "M_grid": [12, 16, 20], "K_grid": [2, 3, 4]})");
    cmd_tradeoff(spec, opts_);
    const auto curve = read_table(opts_.out_dir / "t_tradeoff.csv");
    ASSERT_EQ(curve.rows.size(), 50u);
    for (std::size_t i = 1; i < curve.rows.size(); ++i) {
        EXPECT_GT(num(curve.rows[i].at("discharge_exponent")), num(curve.rows[i - 1].at("discharge_exponent")));
        EXPECT_LT(num(curve.rows[i].at("loss_exponent")), num(curve.rows[i - 1].at("loss_exponent")));
    }
    const auto pts = read_table(opts_.out_dir / "t_operating_points.csv");
    ASSERT_EQ(pts.rows.size(), 1u);
    EXPECT_NEAR(num(pts.rows[0].at("theory_discharge_exponent")), 0.5, 1e-12);
    EXPECT_NEAR(num(pts.rows[0].at("theory_loss_exponent")), 2.0 * (std::log2(10.0) - 2.0), 1e-9);
    EXPECT_NEAR(num(pts.rows[0].at("theory_loss_exponent")), 2.6439, 1e-4);
    EXPECT_NEAR(num(pts.rows[0].at("fitted_discharge_exponent")), 0.5, 0.1);
}

TEST_F(Cli, OracleAgreesOnSmallChain) {
    const auto cfg = write("small.json", R"({"M": 6, "horizon": 1000000, "seed": 2, "n_replications": 2,
      "replenishment": {"kind": "iid-discrete", "values": [0, 1, 3], "probabilities": [0.3, 0.4, 0.3]},
      "policy": {"kind": "constant", "draw": 1}})");
    const auto r = cmd_oracle(cfg, opts_);
    EXPECT_EQ(r.exit_code, 0);
    const auto t = read_table(opts_.out_dir / "oracle.csv");
    ASSERT_EQ(t.rows.size(), 3u);
    for (const auto& row : t.rows) EXPECT_EQ(row.at("verdict"), "PASS") << row.at("metric");
}

TEST_F(Cli, OracleZeroVarianceRatiosAreZero) {
    cmd_oracle(write("zero.json", kZeroVariance), opts_);
    const auto t = read_table(opts_.out_dir / "oracle.csv");
    ASSERT_EQ(t.rows.size(), 3u);
    for (const auto& row : t.rows) EXPECT_EQ(num(row.at("ratio")), 0.0) << row.at("metric");
}

TEST_F(Cli, OracleRejectsOversizedBattery) {
    const auto cfg = write("big.json", R"({"M": 500,
      "replenishment": {"kind": "iid-discrete", "values": [0, 2], "probabilities": [0.5, 0.5]},
      "policy": {"kind": "constant", "draw": 1}})");
    try {
        cmd_oracle(cfg, opts_);
        FAIL();
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("200-state cap"), std::string::npos) << e.what();
        EXPECT_EQ(exit_code_for(e), 2);
    }
}

TEST_F(Cli, CsvBodiesDoNotDependOnThreadsOrReruns) {
    const auto cfg = write("j.json", R"({"mode": "joint", "M": 30, "K": 10, "horizon": 50000, "n_replications": 4,
      "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 4},
      "arrivals": {"kind": "poisson", "mean": 2}, "policy": {"kind": "scheme-e", "delta_r": 0.5}})");
    std::vector<std::string> bodies;
    for (std::uint32_t threads : {1u, 1u, 3u}) {
        opts_.threads = threads;
        cmd_simulate(cfg, opts_);
        bodies.push_back(csv_body(opts_.out_dir / "simulate.csv"));
    }
    EXPECT_EQ(bodies[0], bodies[1]);
    EXPECT_EQ(bodies[0], bodies[2]);
    opts_.seed = 77;
    cmd_simulate(cfg, opts_);
    EXPECT_NE(csv_body(opts_.out_dir / "simulate.csv"), bodies[0]);
}

TEST_F(Cli, CsvLayout) {
    cmd_simulate(write("fmt.json", R"({"M": 40, "horizon": 200000, "seed": 11,
      "replenishment": {"kind": "iid-gaussian", "mean": 10, "variance": 4},
      "policy": {"kind": "scheme-e", "delta_r": 0.5}, "trace": {"path": "slots.csv", "limit": 7}})"),
                 opts_);
    const auto t = read_table(opts_.out_dir / "simulate.csv");
    ASSERT_GE(t.comments.size(), 3u);
    EXPECT_NE(t.comments[1].find("config_hash="), std::string::npos);
    EXPECT_NE(t.comments[1].find("seed=11"), std::string::npos);
    int timestamps = 0;
    for (const auto& c : t.comments) timestamps += c.find("generated") != std::string::npos;
    EXPECT_EQ(timestamps, 1);
    const std::regex sci(R"(^\d\.\d{5}e[+-]\d{2}$)");
    for (const char* col : {"p_discharge", "p_discharge_hw", "p_loss", "p_loss_hw"})
        EXPECT_TRUE(std::regex_match(t.rows.at(0).at(col), sci)) << col << '=' << t.rows[0].at(col);
    EXPECT_EQ(fmt_prob(4.54e-5), "4.54000e-05");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");

    const auto trace = read_table(opts_.out_dir / "slots.csv");
    const std::vector<std::string> cols{"slot", "B", "Q", "e", "service", "r", "a", "discharged", "lost"};
    EXPECT_EQ(trace.header, cols);
    EXPECT_EQ(trace.rows.size(), 7u);
}

TEST_F(Cli, StatsOnSpecAndTraceFile) {
    cmd_stats(write("s.json", R"({"source": {"kind": "iid-gaussian", "mean": 10, "variance": 4},
      "horizon": 1000000, "batch_len": 1000, "seed": 4})"),
              opts_);
    auto t = read_table(opts_.out_dir / "stats.csv");
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_NEAR(num(t.rows[0].at("mean")), 10.0, 0.01);
    EXPECT_NEAR(num(t.rows[0].at("asym_var")), 4.0, 0.4);

    std::string trace = "# two-slot pattern\nvalue\n";
    for (int i = 0; i < 200000; ++i) trace += i % 2 ? "3\n" : "1\n";
    cmd_stats(write("pattern.txt", trace), opts_, 1000);
    t = read_table(opts_.out_dir / "stats.csv");
    EXPECT_NEAR(num(t.rows[0].at("mean")), 2.0, 1e-12);
    EXPECT_NEAR(num(t.rows[0].at("declared_mean")), 2.0, 1e-12);
    EXPECT_LT(num(t.rows[0].at("asym_var")), 1e-6);  // alternating sequence: batch sums are exact
}

#ifdef EHSIM_CLI_PATH
TEST_F(Cli, BinaryExitCodes) {
    const auto bad = write("bad.json", R"({"M": -1, "replenishment": {"kind": "poisson", "mean": 3},
      "policy": {"kind": "constant"}})");
    const auto good = write("zero.json", kZeroVariance);
    const std::string exe = EHSIM_CLI_PATH;
    const std::string out = " --out-dir " + (dir_ / "cli").string() + " -q";
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " 2>/dev/null").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status(exe + out + " simulate " + good.string()), 0);
    EXPECT_EQ(status(exe + out + " simulate " + bad.string()), 2);
    EXPECT_EQ(status(exe + out + " --threads 2 --seed 5 oracle " + good.string()), 0);
    EXPECT_TRUE(fs::exists(dir_ / "cli" / "oracle.csv"));
}
#endif
