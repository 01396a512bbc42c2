#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fqlems/config.hpp"
#include "fqlems/errors.hpp"
#include "json.hpp"

using namespace fqlems;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int exit_code(int status) {
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("fqlems_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    int run(const std::string& args) {
        const std::string cmd = std::string(FQLEMS_CLI) + " " + args + " > " + (dir / "stdout.txt").string() +
                                " 2> " + (dir / "stderr.txt").string();
        return exit_code(std::system(cmd.c_str()));
    }
    std::string out() const { return slurp(dir / "stdout.txt"); }
    std::string err() const { return slurp(dir / "stderr.txt"); }

    std::string short_cycle() {
        const auto p = dir / "short.csv";
        std::ofstream f(p);
        f << "t_s,v\n";
        for (int k = 0; k < 60; ++k) f << k << ',' << (k < 30 ? 0.4 * k : 0.4 * (60 - k)) << '\n';
        return p.string();
    }
};

}  // namespace

TEST(Config, UnknownKeyRejected) {
    RunConfig cfg;
    EXPECT_THROW(cfg.set("agent.learning_rate", "0.1"), ConfigError);
    EXPECT_THROW(cfg.get("nope"), ConfigError);
}

TEST(Config, DefaultsMatchRecords) {
    RunConfig cfg;
    EXPECT_EQ(cfg.agent().alpha, 0.005);
    EXPECT_EQ(cfg.agent().gamma, 0.999);
    EXPECT_EQ(cfg.env().soc_penalty_weight, 200.0);
    EXPECT_EQ(cfg.env().start_penalty_weight, 0.2);
    EXPECT_EQ(cfg.train().episodes, 1000);
    EXPECT_EQ(cfg.train().epsilon_end, 0.001);
}

TEST(Config, SeedFallsBackToEnvironment) {
    ::setenv("FQL_EMS_SEED", "1234", 1);
    RunConfig cfg;
    ::unsetenv("FQL_EMS_SEED");
    EXPECT_EQ(cfg.agent().seed, 1234u);
}

TEST(Config, DumpReloadsIdentically) {
    RunConfig cfg;
    cfg.set("agent.alpha", "0.01");
    cfg.set("env.penalty_mode", "terminal_lump");
    const auto path = fs::temp_directory_path() / "fqlems_dump.cfg";
    std::ofstream(path) << cfg.dump();
    RunConfig back;
    back.load_file(path.string());
    EXPECT_EQ(back.dump(), cfg.dump());
    EXPECT_EQ(back.env().penalty_mode, PenaltyMode::terminal_lump);
    fs::remove(path);
}

TEST(Config, RelativePathsResolveAgainstFile) {
    const auto d = fs::temp_directory_path() / "fqlems_rel";
    fs::create_directories(d / "sub");
    std::ofstream(d / "sub" / "c.csv") << "t_s,v\n0,0\n1,1\n2,2\n";
    std::ofstream(d / "run.cfg") << "# comment\nrun.cycle = sub/c.csv\ntrain.episodes = 3\n";
    RunConfig cfg;
    cfg.load_file((d / "run.cfg").string());
    EXPECT_EQ(cfg.load_drive_cycle().size(), 3u);
    EXPECT_EQ(cfg.train().episodes, 3);
    fs::remove_all(d);
}

TEST(Config, MalformedLines) {
    const auto path = fs::temp_directory_path() / "fqlems_bad.cfg";
    std::ofstream(path) << "agent.alpha 0.1\n";
    RunConfig cfg;
    EXPECT_THROW(cfg.load_file(path.string()), ConfigError);
    fs::remove(path);
    RunConfig num;
    num.set("agent.alpha", "fast");
    EXPECT_THROW(num.agent(), ConfigError);
}

TEST_F(Cli, MissingCycleExitsTwoAndNamesPath) {
    EXPECT_EQ(run("train --cycle /nonexistent/cycle.csv --out-dir " + (dir / "o").string()), 2);
    EXPECT_NE(err().find("/nonexistent/cycle.csv"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("train"), 2);
    EXPECT_EQ(run("train --out-dir x --set no.such=1"), 2);
    EXPECT_EQ(run("bogus"), 2);
}

TEST_F(Cli, TrainOneEpisodeWritesArtifacts) {
    const auto o = dir / "o";
    ASSERT_EQ(run("train --quiet --episodes 1 --cycle " + short_cycle() + " --out-dir " + o.string()), 0) << err();
    EXPECT_TRUE(fs::exists(o / "agent.json"));
    EXPECT_TRUE(fs::exists(o / "training_curve.csv"));
    EXPECT_TRUE(fs::exists(o / "resolved_config.cfg"));
}

TEST_F(Cli, TrainIsReproducibleFromSeedAndSnapshot) {
    const std::string cyc = short_cycle();
    ASSERT_EQ(run("train --quiet --episodes 5 --seed 7 --cycle " + cyc + " --out-dir " + (dir / "a").string()), 0);
    ASSERT_EQ(run("train --quiet --episodes 5 --seed 7 --cycle " + cyc + " --out-dir " + (dir / "b").string()), 0);
    EXPECT_EQ(slurp(dir / "a" / "agent.json"), slurp(dir / "b" / "agent.json"));
    ASSERT_EQ(run("train --quiet --config " + (dir / "a" / "resolved_config.cfg").string() + " --out-dir " +
                  (dir / "c").string()),
              0)
        << err();
    EXPECT_EQ(slurp(dir / "a" / "agent.json"), slurp(dir / "c" / "agent.json"));
}

TEST_F(Cli, EvalReportAndTrajectory) {
    const std::string cyc = short_cycle();
    ASSERT_EQ(run("train --quiet --episodes 2 --cycle " + cyc + " --out-dir " + (dir / "t").string()), 0);
    const std::string agent = (dir / "t" / "agent.json").string();
    const int code = run("eval --agent " + agent + " --cycle " + cyc + " --soc0 0.25 --repeat 10 --out-dir " +
                         (dir / "e").string());
    EXPECT_TRUE(code == 0 || code == 1) << err();
    const auto report = nlohmann::json::parse(slurp(dir / "e" / "eval_report.json"));
    ASSERT_EQ(report.at("repetitions").size(), 10u);
    EXPECT_TRUE(fs::exists(dir / "e" / "resolved_config.cfg"));
    std::ifstream traj(dir / "e" / "trajectory.csv");
    std::string line;
    int rows = -1;
    while (std::getline(traj, line)) ++rows;
    if (report.at("repetitions").at(0).at("completed").get<bool>()) EXPECT_EQ(rows, 60);
    EXPECT_EQ(run("eval --agent " + agent + " --soc0 1.5 --out-dir " + (dir / "x").string()), 2);
}

TEST_F(Cli, EvalRejectsMismatchedAgent) {
    std::ofstream(dir / "bad.json") << "{\"m\": 3}";
    EXPECT_EQ(run("eval --agent " + (dir / "bad.json").string() + " --out-dir " + (dir / "x").string()), 2);
}

TEST_F(Cli, CalibrateToStdoutAndFile) {
    ASSERT_EQ(run("calibrate"), 0) << err();
    const auto j = nlohmann::json::parse(out());
    EXPECT_TRUE(j.contains("residuals"));
    for (const auto& r : j.at("residuals")) EXPECT_LE(std::abs(r.get<double>()), 0.02);
    ASSERT_EQ(run("calibrate --out " + (dir / "cal.json").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "cal.json"));
}

TEST_F(Cli, ImpossibleAnchorFailsCalibration) {
    EXPECT_EQ(run("calibrate --set calibration.max_power_current_a=10"), 1);
}

TEST_F(Cli, CompareSmoke) {
    ASSERT_EQ(run("compare --seeds 1 --episodes 2 --cycle " + short_cycle()), 0) << err();
    const std::string text = out();
    EXPECT_NE(text.find("without_start_penalty"), std::string::npos);
    EXPECT_NE(text.find("with_start_penalty"), std::string::npos);
    int lines = 0;
    for (char c : text) lines += c == '\n';
    EXPECT_EQ(lines, 3);
}

TEST_F(Cli, Summary) {
    ASSERT_EQ(run("summary --cycle " + short_cycle()), 0);
    const auto j = nlohmann::json::parse(out());
    EXPECT_DOUBLE_EQ(j.at("duration_s").get<double>(), 59.0);
}
