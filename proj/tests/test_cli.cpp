#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>

namespace {

struct CliRun {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(OULAB_CLI) + " " + args + " 2>&1";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_tmp(const std::string& name, const std::string& text) {
    const auto path = (std::filesystem::temp_directory_path() / ("oulab_cli_" + name)).string();
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST(Cli, EigenExampleResidual) {
    const CliRun r = run("eigen --gamma=-1 --q=1 --lambda=-0.5+0.3i");
    ASSERT_EQ(r.code, 0) << r.out;
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.out, m, std::regex(R"(gen_residual=([0-9.eE+-]+))"))) << r.out;
    EXPECT_LE(std::stod(m[1]), 1e-8);
    EXPECT_NE(r.out.find("pass=1"), std::string::npos);
}

TEST(Cli, ConfigurationErrorsExitOne) {
    CliRun r = run("survey --gamma=-1 --q=1 --re-max=0.1");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("grid must lie in the open left half-plane"), std::string::npos) << r.out;
    r = run("eigen --bogus-flag");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << r.out;
    r = run("");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(run("simulate --builtin demo2d_general").code, 1);
    EXPECT_EQ(run("eigen --builtin nosuchmodel --lambda=-1").code, 1);
    EXPECT_EQ(run("eigen --config /nonexistent/oulab.cfg --lambda=-1").code, 1);
}

TEST(Cli, NumericFailureExitsTwo) {
    const auto model = write_tmp("unstable.txt", "A = 0.5 0; 0 -1\nB = 1 0; 0 1\n");
    const CliRun r = run("eigen --model " + model + " --lambda=-1");
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_NE(r.out.find("not stable"), std::string::npos) << r.out;
    std::filesystem::remove(model);
}

TEST(Cli, FailedCheckExitsThree) {
    const auto cfg = write_tmp("strict.cfg", "gamma = -1\nq = 1\ngen_tol = 1e-30\n");
    const CliRun r = run("eigen --config " + cfg + " --lambda=-0.5+0.3i");
    EXPECT_EQ(r.code, 3) << r.out;
    EXPECT_NE(r.out.find("pass=0"), std::string::npos);
    std::filesystem::remove(cfg);
}

TEST(Cli, EmptySurveySucceeds) {
    const CliRun r = run("survey --gamma=-1 --q=1 --re-min=-0.5 --re-max=-1");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("rows=0"), std::string::npos);
}

TEST(Cli, ReducePrintsJson) {
    const CliRun r = run("reduce --builtin demo2d_iso");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("\"covariance_identity\""), std::string::npos) << r.out;
}

TEST(Cli, CheckSubsetOfCriteria) {
    const CliRun r = run("check --builtin demo1d --criteria 1,6");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("PASS"), std::string::npos) << r.out;
}

TEST(Cli, SurveyCsvAcceptedByPlotScript) {
    const auto csv = (std::filesystem::temp_directory_path() / "oulab_cli_survey.csv").string();
    const CliRun r = run("survey --gamma=-1 --q=1 --re-min=-1.5 --im-min=-1 --im-max=1 --out-csv " + csv);
    ASSERT_EQ(r.code, 0) << r.out;
    const std::string cmd = std::string(OULAB_PYTHON) + " " + OULAB_PLOT_SCRIPT + " --check " + csv + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    char buf[512] = {0};
    const std::size_t n = std::fread(buf, 1, sizeof buf - 1, p);
    const int status = pclose(p);
    EXPECT_EQ(WEXITSTATUS(status), 0) << std::string(buf, n);
    EXPECT_EQ(std::string(buf, n).rfind("15 rows, 15 pass", 0), 0u) << std::string(buf, n);
    std::filesystem::remove(csv);
}
