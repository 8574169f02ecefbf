#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using nlohmann::json;

const std::string kP0 = " --kappa 1 --theta 0.04 --sigma 0.25 --rho -0.5 --v0 0.04";

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(HSVI_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("hsvi_cli_" + std::to_string(::getpid()) + "_" + name)).string();
}

TEST(Cli, AsymptoteFiveRows) {
    const auto r = run("asymptote" + kP0 + " --xmin -0.1 --xmax 0.1 --n 5 --form closed");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> rows;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            EXPECT_EQ(line, "x,variance");
            header = true;
            continue;
        }
        rows.push_back(line);
    }
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[2].substr(0, 2), "0,");
    EXPECT_NEAR(std::stod(rows[2].substr(2)), 0.0375499, 1e-7);
}

TEST(Cli, AsymptoteSinglePoint) {
    const auto r = run("asymptote" + kP0 + " --xmin 0 --xmax 0 --n 1 --form pipeline");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\n0,0.037549862670959"), std::string::npos);
}

TEST(Cli, AsymptoteIsBitwiseStable) {
    const std::string args = "asymptote" + kP0 + " --xmin -0.3 --xmax 0.3 --n 101";
    EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, LargeCorrelationIsInvalidInput) {
    const std::string bad = " --kappa 0.1 --theta 0.04 --sigma 0.3 --rho 0.9 --v0 0.04";
    const std::string cmd = std::string(HSVI_CLI_PATH) + " asymptote" + bad + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    ASSERT_NE(pipe, nullptr);
    std::string out;
    char buf[1024];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = ::pclose(pipe);
    EXPECT_EQ(WEXITSTATUS(status), 2);
    EXPECT_NE(out.find("large correlation regime"), std::string::npos);
    EXPECT_EQ(run("saddle-check" + bad).code, 2);
    EXPECT_EQ(run("verify" + bad).code, 2);
}

TEST(Cli, MalformedInputs) {
    EXPECT_EQ(run("asymptote --kappa 1").code, 2);
    EXPECT_EQ(run("asymptote" + kP0 + " --n abc").code, 2);
    EXPECT_EQ(run("nonsense").code, 2);
    EXPECT_EQ(run("fit --in /nonexistent/file.csv").code, 2);
}

TEST(Cli, VerifyPasses) {
    const auto r = run("verify" + kP0);
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["command"], "verify");
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_LE(j["max_deviation"].get<double>(), 1e-10);
    EXPECT_EQ(j["inputs"]["grid_points"], 1001);
    EXPECT_TRUE(j.contains("duration_seconds"));
}

TEST(Cli, VerifyAtmOnly) {
    const auto j = json::parse(run("verify" + kP0 + " --grid 0").out);
    EXPECT_LE(j["max_deviation"].get<double>(), 1e-14);
}

TEST(Cli, VerifyRandomSuite) {
    const auto r = run("verify" + kP0 + " --random 100 --seed 7");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["outputs"]["random_failures"], 0);
    EXPECT_EQ(j["outputs"]["random_sets"].size(), 100u);
}

TEST(Cli, ImpossibleToleranceFailsVerification) {
    EXPECT_EQ(run("verify" + kP0 + " --tol 0 --xmin -0.4 --xmax 0.4 --n 101").code, 1);
}

TEST(Cli, SaddleCheck) {
    auto r = run("saddle-check" + kP0);
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(json::parse(r.out)["pass"].get<bool>());
    r = run("saddle-check --kappa 1 --theta 0.04 --sigma 0.25 --rho 0 --v0 0.04");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["outputs"]["u_tilde_at_0"]["re"].get<double>(), 0.0);
    EXPECT_EQ(j["outputs"]["u_tilde_at_0"]["im"].get<double>(), 0.0);
}

TEST(Cli, MapParams) {
    const auto r = run("map-params" + kP0 + " --T 10");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out)["outputs"];
    EXPECT_EQ(j["omega"]["omega2"].get<double>(), 6.25);
    EXPECT_NEAR(j["raw"]["m"].get<double>(), 0.8, 1e-15);
    EXPECT_TRUE(j["raw"].contains("sigma_tilde"));
}

TEST(Cli, SmileThenFit) {
    const std::string csv = temp_path("smile.csv");
    ASSERT_EQ(run("smile" + kP0 + " --T 50 --xmin -0.25 --xmax 0.25 --n 21 --out " + csv).code, 0);
    const auto r = run("fit --in " + csv);
    std::filesystem::remove(csv);
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["outputs"]["interpretation"]["orientation"].get<double>(), -0.5, 0.02);
}

TEST(Cli, Converge) {
    const auto r = run("converge" + kP0 + " --T 1,5,20,50");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["outputs"]["rows"].size(), 4u);
}

TEST(Cli, ConfigFileAndOverride) {
    const std::string cfg = temp_path("cfg.json");
    {
        std::ofstream f(cfg);
        f << R"({"kappa": 1, "theta": 0.04, "sigma": 0.25, "rho": 0.3, "v0": 0.04, "T": 10})";
    }
    const auto from_file = json::parse(run("map-params --config " + cfg).out);
    const auto overridden = json::parse(run("map-params --config " + cfg + " --rho -0.5").out);
    std::filesystem::remove(cfg);
    EXPECT_EQ(from_file["inputs"]["heston"]["rho"].get<double>(), 0.3);
    EXPECT_EQ(overridden["inputs"]["heston"]["rho"].get<double>(), -0.5);
    EXPECT_NEAR(overridden["outputs"]["raw"]["m"].get<double>(), 0.8, 1e-15);
}

}  // namespace
