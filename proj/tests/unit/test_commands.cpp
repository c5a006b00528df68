#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "putbond/commands.hpp"
#include "putbond/errors.hpp"

using namespace putbond;

namespace {

struct CliRun {
    int status = -1;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(PUTBOND_CLI) + " " + args + " 2>&1";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.out += buf;
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("putbond_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path.string();
}

std::vector<std::vector<double>> parse_csv(const std::string& csv, std::vector<std::string>* header = nullptr) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    if (header != nullptr) {
        std::istringstream h(line);
        for (std::string cell; std::getline(h, cell, ',');) header->push_back(cell);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

double field(const std::string& out, const std::string& key) {
    const auto pos = out.find(key + ": ");
    if (pos == std::string::npos) return std::nan("");
    return std::stod(out.substr(pos + key.size() + 2));
}

}  // namespace

TEST(Cli, ValidateBasicBond) {
    const CliRun r = run_cli("validate");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("coupon condition: holds"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("M: 2"), std::string::npos) << r.out;
}

TEST(Cli, ValidateFlagsZeroCouponDesign) {
    const auto dir = scratch_dir("zero");
    const std::string cfg = write_file(dir / "zero.json", R"({
      "bond": {"maturity_dates": [1, 2, 3], "coupons": [0, 0, 0], "face_value": 1000},
      "market": {"short_rate": 0.03, "payout_rate": 0, "volatility": 1.0, "recovery": 0.5}})");
    const CliRun r = run_cli("validate --config " + cfg);
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("FAILS"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("zero-coupon"), std::string::npos) << r.out;
}

TEST(Cli, MissingFaceValueExitsWithConfigError) {
    const auto dir = scratch_dir("missing");
    const std::string cfg = write_file(dir / "bad.json", R"({
      "bond": {"maturity_dates": [1], "coupons": [40]},
      "market": {"short_rate": 0.03, "payout_rate": 0, "volatility": 1.0, "recovery": 0.5}})");
    const CliRun r = run_cli("price --config " + cfg);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("face_value"), std::string::npos) << r.out;
}

TEST(Cli, DomainErrorExitsWithOne) {
    const CliRun r = run_cli("price --v -5");
    EXPECT_EQ(r.status, 1) << r.out;
}

TEST(Cli, PriceEdgeCases) {
    EXPECT_EQ(field(run_cli("price --v 0 --t 0").out, "analytic"), 0.0);
    EXPECT_EQ(field(run_cli("price --v 2000 --t 3").out, "analytic"), 1040.0);
}

TEST(Cli, BothEnginesAgree) {
    const CliRun r = run_cli("price --v 10000 --t 0 --engine both");
    EXPECT_EQ(r.status, 0);
    EXPECT_LT(field(r.out, "relative_gap"), 0.005) << r.out;
}

TEST(Cli, UnknownFigureExitsWithConfigError) {
    const CliRun r = run_cli("sweep --figure fig99 --out " + scratch_dir("unknown").string());
    EXPECT_EQ(r.status, 2);
}

TEST(Cli, SweepIsByteIdenticalAcrossRuns) {
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    ASSERT_EQ(run_cli("sweep --figure fig13 --seed 5 --out " + a.string()).status, 0);
    ASSERT_EQ(run_cli("sweep --figure fig13 --seed 5 --out " + b.string()).status, 0);
    std::ifstream fa(a / "fig13.csv", std::ios::binary), fb(b / "fig13.csv", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, sb);
    EXPECT_EQ(sa.find('\r'), std::string::npos);
}

TEST(Cli, ConfigCommandEmitsDefaults) {
    const CliRun r = run_cli("config");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, emit_config(RunConfig{}));
}

TEST(Sweep, Figure4BoundaryCrossings) {
    std::vector<std::string> header;
    const auto rows = parse_csv(sweep_csv(RunConfig{}, "fig4", CommandOptions{}), &header);
    ASSERT_EQ(header, (std::vector<std::string>{"V", "keep_value", "redeem_value", "max_value", "identity"}));
    EXPECT_EQ(rows.front()[0], 0.0);
    EXPECT_EQ(rows.back()[0], 16000.0);
    double default_cross = std::nan(""), redeem_cross = std::nan("");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& p = rows[k - 1];
        const auto& q = rows[k];
        if ((p[4] - p[3]) < 0.0 && (q[4] - q[3]) >= 0.0) default_cross = q[0];
        if (p[1] < p[2] && q[1] >= q[2]) redeem_cross = q[0];
    }
    EXPECT_NEAR(default_cross, 1000.0, 40.0);
    EXPECT_NEAR(redeem_cross, 11945.0, 0.01 * 11945.0);
}

TEST(Sweep, Figure12InitialPriceSlightlyAboveFace) {
    std::vector<std::string> header;
    const auto rows = parse_csv(sweep_csv(RunConfig{}, "fig12", CommandOptions{}), &header);
    ASSERT_EQ(header, (std::vector<std::string>{"t", "B_C80", "B_C90", "B_C100"}));
    EXPECT_LT(rows.front()[1], 1000.0);
    EXPECT_GT(rows.front()[2], 1000.0);
    EXPECT_LT(rows.front()[2], 1020.0);
    EXPECT_GT(rows.front()[3], rows.front()[2]);
}

TEST(Sweep, Figure9Shape) {
    std::vector<std::string> header;
    const auto rows = parse_csv(sweep_csv(RunConfig{}, "fig9", CommandOptions{}), &header);
    ASSERT_EQ(header, (std::vector<std::string>{"t", "B_V5000", "B_V10000", "B_V15000"}));
    for (const auto& row : rows) {
        if (row[0] == 1.0) {
            EXPECT_DOUBLE_EQ(row[1], 1000.0);
            EXPECT_DOUBLE_EQ(row[2], 1000.0);
        }
        if (row[0] == 3.0) {
            EXPECT_DOUBLE_EQ(row[3], 1040.0);
        }
    }
}

TEST(Sweep, EveryFigureProducesAHeaderAndRows) {
    CommandOptions opts;
    opts.t_step = 0.5;
    opts.v_step = 2000.0;
    for (const auto& id : figure_ids()) {
        const std::string csv = sweep_csv(RunConfig{}, id, opts);
        const auto rows = parse_csv(csv);
        EXPECT_GE(rows.size(), 6u) << id;
    }
    try {
        sweep_csv(RunConfig{}, "fig3", opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownFigure);
    }
}
