// Runs the sheq binary end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(SHEQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return std::string(SHEQ_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sheq_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, SimulateWritesOutputs) {
    const auto out = scratch("simulate");
    ASSERT_EQ(run("simulate --config " + config("minimal_1d.json") + " --out " + out.string()), 0);
    for (const char* f : {"effective_config.json", "summary.json", "trajectory.txt", "probes.txt", "trajectory.bin"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    const auto eff = nlohmann::json::parse(slurp(out / "effective_config.json"));
    EXPECT_EQ(eff["modes"], 16);
    EXPECT_EQ(eff["output"], out.string());
}

TEST(Cli, RerunsAreByteIdentical) {
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    const std::string args = "density --config " + config("cubic_sine_yosida.json");
    ASSERT_EQ(run(args + " --workers 2 --out " + a.string()), 0);
    ASSERT_EQ(run(args + " --workers 1 --out " + b.string()), 0);
    EXPECT_EQ(slurp(a / "ensemble.txt"), slurp(b / "ensemble.txt"));
    EXPECT_FALSE(slurp(a / "ensemble.txt").empty());
}

TEST(Cli, SeedOverrideChangesResult) {
    const auto a = scratch("seed_a");
    const auto b = scratch("seed_b");
    ASSERT_EQ(run("simulate --config " + config("minimal_1d.json") + " --out " + a.string()), 0);
    ASSERT_EQ(run("simulate --config " + config("minimal_1d.json") + " --seed 99 --out " + b.string()), 0);
    EXPECT_NE(slurp(a / "trajectory.txt"), slurp(b / "trajectory.txt"));
}

TEST(Cli, InvalidConfigsExitWithOne) {
    const auto out = scratch("invalid");
    EXPECT_EQ(run("simulate --config " + config("invalid_gamma.json") + " --out " + out.string()), 1);
    EXPECT_EQ(run("density --config " + config("invalid_paths.json") + " --out " + out.string()), 1);
    EXPECT_EQ(run("simulate --config " + config("invalid_unknown_key.json") + " --out " + out.string()), 1);
    EXPECT_EQ(run("simulate --config /nonexistent.json"), 1);
    EXPECT_EQ(run("no-such-command"), 1);
    EXPECT_EQ(run("verify no-such-suite"), 1);
}

TEST(Cli, VerifySuitePasses) {
    const auto out = scratch("verify");
    EXPECT_EQ(run("verify drift --out " + out.string()), 0);
    EXPECT_EQ(run("verify kernels --out " + out.string()), 0);
}

TEST(Cli, GxtAndMalliavin) {
    const auto g = scratch("gxt");
    ASSERT_EQ(run("gxt --config " + config("cube_gxt.json") + " --out " + g.string()), 0);
    EXPECT_TRUE(fs::exists(g / "gxt.txt"));
    const auto m = scratch("malliavin");
    ASSERT_EQ(run("malliavin --second --config " + config("second_derivative.json") + " --out " + m.string()), 0);
    EXPECT_TRUE(fs::exists(m / "malliavin.txt"));
    const auto summary = nlohmann::json::parse(slurp(m / "summary.json"));
    EXPECT_FALSE(summary.empty());
}
