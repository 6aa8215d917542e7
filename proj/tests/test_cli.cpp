#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "edgeweight/commands.hpp"

using namespace edgeweight;
using cli::Json;
using cli::RunConfig;

namespace {

struct Outcome {
    int code = -1;
    std::string out, err;
};

Outcome run_in_process(const RunConfig& cfg) {
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(cfg, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(EDGEWEIGHT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST(Grid, DefaultsAndValidation) {
    RunConfig cfg;
    const auto xs = cli::resolve_grid(cfg);
    ASSERT_EQ(xs.size(), 3u);
    EXPECT_DOUBLE_EQ(xs[0], 2.0 - 0.05);
    EXPECT_DOUBLE_EQ(xs[2], 2.0 - 0.01);

    cfg.x_min = 1.0;
    cfg.x_max = 1.99;
    cfg.points = 3;
    const auto g = cli::resolve_grid(cfg);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_NEAR((2.0 - g[1]) * (2.0 - g[1]), (2.0 - g[0]) * (2.0 - g[2]), 1e-12);  // geometric in delta

    RunConfig bad;
    bad.xs = {2.0};
    EXPECT_THROW(cli::resolve_grid(bad), ConfigError);
}

TEST(Format, NumbersAndCsv) {
    EXPECT_EQ(cli::format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(cli::format_number(kNaN), "");
    EXPECT_EQ(cli::csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(cli::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(cli::csv_escape("plain"), "plain");
}

TEST(Weight, DefaultSweepPasses) {
    RunConfig cfg;
    cfg.command = "weight";
    cfg.threads = 2;
    const auto o = run_in_process(cfg);
    EXPECT_EQ(o.code, cli::kExitPass) << o.err;
    const auto ls = lines(o.out);
    ASSERT_EQ(ls.size(), 4u);
    EXPECT_EQ(ls[0], cli::kCsvHeader);
    for (std::size_t i = 1; i < ls.size(); ++i) EXPECT_NE(ls[i].find(",1,"), std::string::npos) << ls[i];
}

TEST(Weight, FreeModelHasZeroExponent) {
    RunConfig cfg;
    cfg.command = "weight";
    cfg.format = "json";
    cfg.model["kind"] = "free";
    cfg.xs = {1.0};
    const auto o = run_in_process(cfg);
    EXPECT_EQ(o.code, cli::kExitPass) << o.err;
    const auto j = Json::parse(o.out);
    EXPECT_EQ(j["schema_version"], cli::kSchemaVersion);
    ASSERT_EQ(j["rows"].size(), 1u);
    EXPECT_EQ(j["rows"][0]["g"].get<double>(), 0.0);
    EXPECT_EQ(j["rows"][0]["N"].get<double>(), 0.0);
}

TEST(Weight, BadInputIsAConfigError) {
    RunConfig cfg;
    cfg.command = "weight";
    cfg.xs = {2.0};
    EXPECT_EQ(run_in_process(cfg).code, cli::kExitConfigError);
    RunConfig fmt;
    fmt.command = "weight";
    fmt.format = "xml";
    EXPECT_EQ(run_in_process(fmt).code, cli::kExitConfigError);
    RunConfig model;
    model.command = "weight";
    model.model["kind"] = "custom";
    model.model["b"] = "-1,-0.2,-0.5,-0.1";
    EXPECT_EQ(run_in_process(model).code, cli::kExitConfigError);
    RunConfig unknown;
    unknown.command = "dance";
    EXPECT_EQ(run_in_process(unknown).code, cli::kExitConfigError);
}

TEST(Weight, RepeatedRunsAreByteIdentical) {
    RunConfig cfg;
    cfg.command = "weight";
    cfg.format = "json";
    cfg.threads = 4;
    const auto a = run_in_process(cfg);
    cfg.threads = 1;
    const auto b = run_in_process(cfg);
    EXPECT_EQ(a.out, b.out);
}

TEST(Series, CoefficientsAndC20) {
    RunConfig cfg;
    cfg.command = "series";
    cfg.L = 3;
    cfg.deltas = {0.01};
    const auto o = run_in_process(cfg);
    EXPECT_EQ(o.code, cli::kExitPass);
    const auto j = Json::parse(o.out);
    EXPECT_EQ(j["coefficients"], Json::parse(R"(["1","-1/24","3/640","-5/7168"])"));
    EXPECT_FALSE(j["c20"]["match"].get<bool>());
    EXPECT_EQ(j["q_series"][0]["terms"].size(), 2u);
}

TEST(Szego, HalfPowerIsQuasiBorderline) {
    RunConfig cfg;
    cfg.command = "szego-check";
    const auto o = run_in_process(cfg);
    EXPECT_EQ(o.code, cli::kExitPass);
    EXPECT_EQ(Json::parse(o.out)["classification"], "quasi-Szegő borderline");
}

TEST(Continuum, DefaultRowsPass) {
    RunConfig cfg;
    cfg.command = "continuum";
    cfg.format = "json";
    const auto o = run_in_process(cfg);
    EXPECT_EQ(o.code, cli::kExitPass) << o.err;
    const auto j = Json::parse(o.out);
    ASSERT_EQ(j["rows"].size(), 3u);
    for (const auto& r : j["rows"]) EXPECT_EQ(r["pass"], true);
}

TEST(Output, WritesToFile) {
    RunConfig cfg;
    cfg.command = "weight";
    cfg.xs = {1.9};
    cfg.output = testing::TempDir() + "edgeweight_out.csv";
    const auto o = run_in_process(cfg);
    EXPECT_EQ(o.code, cli::kExitPass);
    EXPECT_TRUE(o.out.empty());
    std::ifstream f(cfg.output);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, cli::kCsvHeader);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run_binary("series --L 3"), 0);
    EXPECT_EQ(run_binary("weight --x 2"), 2);
    EXPECT_EQ(run_binary("weight --no-such-flag"), 2);
    EXPECT_EQ(run_binary(""), 2);
    EXPECT_EQ(run_binary("verify --quick"), 0);
    EXPECT_EQ(run_binary("verify --quick --perturb-monotonicity"), 1);
}
