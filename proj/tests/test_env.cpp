#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "fqlems/env.hpp"
#include "fqlems/errors.hpp"

using namespace fqlems;

namespace {

const PowertrainModel& model() {
    static const PowertrainModel m = PowertrainModel::make({}, {}, {});
    return m;
}

DriveCycle standstill(std::size_t n) { return derive_power(make_cycle("still", 1.0, std::vector<double>(n, 0.0)), {}); }

const DriveCycle& udds() {
    static const DriveCycle c = derive_power(load_cycle(FQLEMS_DATA_DIR "/cycles/udds.csv"), {});
    return c;
}

}  // namespace

TEST(Reset, InitialObservation) {
    const auto c = standstill(5);
    Environment env(c, model(), {});
    const Observation o = env.reset();
    EXPECT_EQ(o.soc, 0.5);
    EXPECT_EQ(env.state().step, 0u);
    EXPECT_FALSE(env.state().fc_on);
    EXPECT_EQ(env.state().n_start, 0);
    EXPECT_THROW(env.reset(1.5), ConfigError);
    EnvConfig bad;
    bad.initial_soc = 1.5;
    EXPECT_THROW(Environment(c, model(), bad), ConfigError);
}

TEST(Reset, Repeatable) {
    Environment env(udds(), model(), {});
    env.step(5e3);
    env.reset(0.4);
    const EnvState a = env.state();
    env.step(20e3);
    env.reset(0.4);
    const EnvState b = env.state();
    EXPECT_EQ(a.soc, b.soc);
    EXPECT_EQ(a.step, b.step);
    EXPECT_EQ(a.n_start, b.n_start);
    EXPECT_EQ(a.hydrogen_g, b.hydrogen_g);
}

TEST(Step, AtReferenceWithFuelCellOffRewardIsZero) {
    const auto c = standstill(5);
    Environment env(c, model(), {});
    const StepResult s = env.step(0.0);
    EXPECT_EQ(s.reward, 0.0);
    EXPECT_EQ(s.mdot_gps, 0.0);
    EXPECT_FALSE(s.start_event);
}

TEST(Step, SocPenaltyAsFraction) {
    const auto c = standstill(5);
    Environment env(c, model(), {});
    env.reset(0.45);
    const StepResult s = env.step(0.0);
    EXPECT_NEAR(s.reward, -200.0 * 0.0025, 1e-12);
    EXPECT_NEAR(s.reward, -0.5, 1e-12);
}

TEST(Step, StartEventsOnRisingEdges) {
    const auto c = standstill(10);
    Environment env(c, model(), {});
    int flagged = 0;
    for (double cmd : {0.0, 10e3, 10e3, 0.0, 10e3}) flagged += env.step(cmd).start_event ? 1 : 0;
    EXPECT_EQ(env.state().n_start, 2);
    EXPECT_EQ(flagged, 2);
}

TEST(Step, ThresholdDefinesOnState) {
    const auto c = standstill(10);
    Environment env(c, model(), {});
    EXPECT_FALSE(env.step(499.0).start_event);
    EXPECT_TRUE(env.step(500.0).start_event);
    EXPECT_FALSE(env.step(499.0).start_event);
    EXPECT_FALSE(env.step(0.0).start_event);
    EXPECT_TRUE(env.step(600.0).start_event);
}

TEST(Step, PerEventPenalty) {
    const auto c = standstill(5);
    Environment env(c, model(), {});
    const StepResult s = env.step(10e3);
    EXPECT_TRUE(s.start_event);
    EXPECT_DOUBLE_EQ(s.start_penalty, 0.2);
    EXPECT_DOUBLE_EQ(s.reward, s.base_reward - 0.2);
}

TEST(Step, TerminalRejectsFurtherSteps) {
    const auto c = standstill(3);
    Environment env(c, model(), {});
    EXPECT_FALSE(env.step(0.0).terminal);
    EXPECT_FALSE(env.step(0.0).terminal);
    EXPECT_TRUE(env.step(0.0).terminal);
    EXPECT_THROW(env.step(0.0), UsageError);
}

TEST(Step, BoundaryExit) {
    const auto c = standstill(10000);
    Environment env(c, model(), {});
    env.reset(0.99);
    StepResult s;
    int steps = 0;
    do {
        s = env.step(100e3);
        ++steps;
    } while (!s.terminal);
    EXPECT_TRUE(s.boundary_exit);
    EXPECT_EQ(s.soc, 1.0);
    EXPECT_LT(steps, 10000);
    EXPECT_TRUE(env.state().boundary_exit);
}

TEST(Step, CommandClamped) {
    const auto c = standstill(5);
    Environment env(c, model(), {});
    EXPECT_EQ(env.step(-5e3).p_fc_cmd_w, 0.0);
    EXPECT_EQ(env.step(150e3).p_fc_cmd_w, 100e3);
}

TEST(Step, BatterySaturationFlagged) {
    const auto c = derive_power(make_cycle("burst", 1.0, {0.0, 30.0, 30.0}), {}, PowerClamp{-50e3, 500e3});
    BatteryParams weak;
    weak.rbat = LookupTable({0.0, 1.0}, {2.0, 2.0});
    const auto m = PowertrainModel::make({}, {}, weak);
    Environment env(c, m, {});
    env.step(0.0);
    const StepResult s = env.step(0.0);
    EXPECT_TRUE(s.battery_saturated);
    EXPECT_NEAR(s.p_bat_w, 0.99 * max_discharge_power(0.5, weak), 1e-6);
    EXPECT_EQ(env.state().battery_saturations, 1);
}

TEST(Properties, RandomCommandsOverUdds) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> cmd(0.0, 40e3);
    std::bernoulli_distribution off(0.3);
    const auto& bat = model().battery;
    for (int episode = 0; episode < 5; ++episode) {
        Environment env(udds(), model(), {});
        bool was_on = false;
        int edges = 0;
        std::size_t steps = 0;
        double prev_soc = env.state().soc;
        for (;;) {
            const double c = off(gen) ? 0.0 : cmd(gen);
            const StepResult s = env.step(c);
            ++steps;
            EXPECT_LE(s.reward, 0.0);
            EXPECT_NEAR(s.p_fc_cmd_w + s.p_bat_cmd_w, s.p_veh_w, 1e-9);
            const bool on = c >= 500.0;
            if (on && !was_on) ++edges;
            was_on = on;
            if (!s.boundary_exit) {
                EXPECT_NEAR(std::abs(s.soc - prev_soc), std::abs(s.i_bat_a) * udds().dt / bat.capacity_as, 1e-12);
            }
            prev_soc = s.soc;
            if (s.terminal) {
                if (!s.boundary_exit) EXPECT_EQ(steps, udds().size());
                break;
            }
        }
        EXPECT_EQ(env.state().n_start, edges);
    }
}

TEST(Return, HandArithmetic) {
    std::vector<StepResult> log(1369);
    for (auto& s : log) s.base_reward = -0.036;
    log[10].start_event = log[500].start_event = log[900].start_event = true;
    EXPECT_NEAR(episode_return(log, 1.0, 0.2), -49.884, 1e-9);
    std::vector<StepResult> zeros(10);
    EXPECT_EQ(episode_return(zeros, 1.0, 0.2), 0.0);
}

TEST(Return, PenaltyModesAgree) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> cmd(0.0, 30e3);
    std::bernoulli_distribution off(0.2);
    std::vector<double> commands(udds().size());
    for (double& c : commands) c = off(gen) ? 0.0 : cmd(gen);

    double totals[2];
    double returns[2];
    int starts[2];
    for (int mode = 0; mode < 2; ++mode) {
        EnvConfig cfg;
        cfg.penalty_mode = mode == 0 ? PenaltyMode::per_event : PenaltyMode::terminal_lump;
        Environment env(udds(), model(), cfg);
        std::vector<StepResult> log;
        for (double c : commands) {
            log.push_back(env.step(c));
            if (log.back().terminal) break;
        }
        totals[mode] = 0.0;
        for (const auto& s : log) totals[mode] += s.reward;
        returns[mode] = episode_return(log, 1.0, cfg.start_penalty_weight);
        starts[mode] = env.state().n_start;
    }
    EXPECT_EQ(starts[0], starts[1]);
    EXPECT_GT(starts[0], 0);
    EXPECT_EQ(returns[0], returns[1]);
    EXPECT_NEAR(totals[0], totals[1], 1e-9);
    EXPECT_NEAR(totals[0], returns[0], 1e-9);
}

TEST(Trajectory, CsvHeaderAndRows) {
    const auto c = standstill(4);
    Environment env(c, model(), {});
    std::vector<StepResult> log;
    for (int k = 0; k < 4; ++k) log.push_back(env.step(1e3));
    const auto path = std::filesystem::temp_directory_path() / "fqlems_traj.csv";
    write_trajectory_csv(log, 1.0, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,t_s,v_mps,p_veh_w,p_fc_w,p_bat_w,i_bat_a,soc,mdot_gps,reward,start_event");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
    std::filesystem::remove(path);
}

TEST(PenaltyModeText, RoundTrip) {
    EXPECT_EQ(parse_penalty_mode("terminal_lump"), PenaltyMode::terminal_lump);
    EXPECT_EQ(parse_penalty_mode(to_string(PenaltyMode::per_event)), PenaltyMode::per_event);
    EXPECT_THROW(parse_penalty_mode("lump"), ConfigError);
}
