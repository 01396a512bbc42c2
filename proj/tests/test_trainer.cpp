#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fqlems/errors.hpp"
#include "fqlems/trainer.hpp"

using namespace fqlems;

namespace {

const PowertrainModel& model() {
    static const PowertrainModel m = PowertrainModel::make({}, {}, {});
    return m;
}

const DriveCycle& udds() {
    static const DriveCycle c = derive_power(load_cycle(FQLEMS_DATA_DIR "/cycles/udds.csv"), {});
    return c;
}

const DriveCycle& short_cycle() {
    static const DriveCycle c = [] {
        const auto& full = udds();
        std::vector<double> v(full.velocity.begin(), full.velocity.begin() + 200);
        return derive_power(make_cycle("udds200", 1.0, v), {});
    }();
    return c;
}

TrainConfig quick(int episodes, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.episodes = episodes;
    cfg.agent.seed = seed;
    return cfg;
}

}  // namespace

TEST(Schedule, EndpointsAndSecondEpisode) {
    TrainConfig cfg;
    EXPECT_DOUBLE_EQ(epsilon_schedule(0, cfg), 1.0);
    EXPECT_DOUBLE_EQ(epsilon_schedule(999, cfg), 0.001);
    EXPECT_NEAR(epsilon_schedule(1, cfg), 0.993109, 5e-7);
    EXPECT_NEAR(epsilon_schedule(1, cfg), std::pow(0.001, 1.0 / 999.0), 1e-15);
}

TEST(Schedule, NonIncreasing) {
    TrainConfig cfg;
    double prev = 2.0;
    for (int k = 0; k < cfg.episodes; ++k) {
        const double e = epsilon_schedule(k, cfg);
        EXPECT_LE(e, prev);
        prev = e;
    }
}

TEST(Schedule, Validation) {
    TrainConfig cfg;
    cfg.episodes = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.episodes = 10;
    cfg.epsilon_end = 0.5;
    cfg.epsilon_start = 0.1;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Train, AlphaZeroKeepsInitialization) {
    TrainConfig cfg = quick(5, 3);
    cfg.agent.alpha = 0.0;
    cfg.agent.q_init_min = -0.1;
    cfg.agent.q_init_max = 0.0;
    const auto result = train(short_cycle(), model(), cfg);
    Rng rng(3);
    EXPECT_EQ(result.agent.q, initial_q(35, 8, cfg.agent, rng));
}

TEST(Train, SameSeedIsBitwiseIdentical) {
    const auto a = train(short_cycle(), model(), quick(30, 8));
    const auto b = train(short_cycle(), model(), quick(30, 8));
    EXPECT_EQ(a.agent.q, b.agent.q);
    ASSERT_EQ(a.curve.size(), b.curve.size());
    for (std::size_t k = 0; k < a.curve.size(); ++k) {
        EXPECT_EQ(a.curve[k].avg_reward, b.curve[k].avg_reward);
        EXPECT_EQ(a.curve[k].final_soc, b.curve[k].final_soc);
        EXPECT_EQ(a.curve[k].n_start, b.curve[k].n_start);
    }
    const auto c = train(short_cycle(), model(), quick(30, 9));
    EXPECT_NE(a.agent.q, c.agent.q);
}

TEST(Train, MetricsIdentity) {
    const auto result = train(short_cycle(), model(), quick(20, 1));
    for (const auto& m : result.curve) {
        EXPECT_NEAR(m.avg_reward * m.steps, m.episode_return, 1e-9);
        EXPECT_GT(m.steps, 0);
        if (m.completed) {
            EXPECT_EQ(m.steps, static_cast<int>(short_cycle().size()));
            EXPECT_GT(m.distance_km, 0.0);
            EXPECT_NEAR(m.h2_g_per_100km, 100.0 * m.hydrogen_g / m.distance_km, 1e-9);
        }
    }
}

TEST(Train, ObserverSeesEveryEpisode) {
    int seen = 0;
    train(short_cycle(), model(), quick(7, 2), [&](const EpisodeMetrics& m) {
        EXPECT_EQ(m.episode, seen);
        ++seen;
    });
    EXPECT_EQ(seen, 7);
}

TEST(Train, PenaltyWeightOnlyChangesReward) {
    TrainConfig with = quick(3, 4);
    with.agent.alpha = 0.0;
    TrainConfig without = with;
    without.env.start_penalty_weight = 0.0;
    const auto a = train(short_cycle(), model(), with);
    const auto b = train(short_cycle(), model(), without);
    for (std::size_t k = 0; k < a.curve.size(); ++k) {
        EXPECT_EQ(a.curve[k].n_start, b.curve[k].n_start);
        EXPECT_EQ(a.curve[k].final_soc, b.curve[k].final_soc);
        EXPECT_EQ(a.curve[k].hydrogen_g, b.curve[k].hydrogen_g);
        EXPECT_NEAR(b.curve[k].episode_return - a.curve[k].episode_return, 0.2 * a.curve[k].n_start, 1e-9);
    }
}

TEST(Train, QStaysWithinRewardBound) {
    TrainConfig cfg = quick(200, 5);
    cfg.agent.q_init_min = -0.1;
    cfg.agent.q_init_max = 0.0;
    const auto result = train(short_cycle(), model(), cfg);
    const double mdot_max = hydrogen_rate(model().fc_max.current_a, model().fuel_cell);
    const double r_max = mdot_max + cfg.env.soc_penalty_weight * 0.25 + cfg.env.start_penalty_weight;
    EXPECT_LE(result.agent.q.cwiseAbs().maxCoeff(), r_max / (1.0 - cfg.agent.gamma) + 0.1);
}

TEST(Evaluate, RepeatableAndChained) {
    const auto trained = train(short_cycle(), model(), quick(50, 6));
    const auto a = evaluate(trained.agent, short_cycle(), model(), {}, 0.5, 4);
    const auto b = evaluate(trained.agent, short_cycle(), model(), {}, 0.5, 4);
    ASSERT_EQ(a.repetitions.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(a.repetitions[k].final_soc, b.repetitions[k].final_soc);
        EXPECT_EQ(a.repetitions[k].avg_reward, b.repetitions[k].avg_reward);
        if (k > 0) EXPECT_EQ(a.repetitions[k].initial_soc, a.repetitions[k - 1].final_soc);
    }
    EXPECT_EQ(to_json(a), to_json(b));
    EXPECT_EQ(a.repetitions[0].episode, 1);
    EXPECT_FALSE(a.first_trajectory.empty());
}

TEST(Evaluate, RejectsBadArguments) {
    FqlAgent agent;
    agent.q = QArray<double>::Zero(35, 8);
    EXPECT_THROW(evaluate(agent, short_cycle(), model(), {}, 1.5, 3), ConfigError);
    EXPECT_THROW(evaluate(agent, short_cycle(), model(), {}, 0.5, 0), ConfigError);
}

TEST(Evaluate, UntrainedAgentsOftenFail) {
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        FqlAgent agent;
        agent.config.q_init_min = -0.1;
        agent.config.q_init_max = 0.0;
        Rng rng(seed);
        agent.q = initial_q(35, 8, agent.config, rng);
        const auto report = evaluate(agent, udds(), model(), {}, 0.5, 1);
        if (!report.all_completed()) ++failures;
    }
    EXPECT_GT(failures, 0);
}

TEST(Evaluate, FailedRepetitionStopsTheChain) {
    FqlAgent agent;
    agent.q = QArray<double>::Zero(35, 8);
    agent.q.col(7).setConstant(1.0);  // always 100 kW: charges into the upper bound
    const auto report = evaluate(agent, udds(), model(), {}, 0.5, 3);
    EXPECT_FALSE(report.repetitions[0].completed);
    EXPECT_FALSE(report.repetitions[1].completed);
    EXPECT_EQ(report.repetitions[1].steps, 0);
    EXPECT_FALSE(report.all_completed());
}

TEST(Outputs, TrainingCurveCsv) {
    const auto result = train(short_cycle(), model(), quick(3, 0));
    const auto path = std::filesystem::temp_directory_path() / "fqlems_curve.csv";
    write_training_curve_csv(result.curve, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "episode,epsilon,avg_reward,h2_g_per_100km,final_soc,n_start,steps");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    std::filesystem::remove(path);
}

TEST(Compare, TwoRows) {
    const auto rows = compare_start_penalty(short_cycle(), model(), quick(5, 0), 2);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].start_penalty_weight, 0.0);
    EXPECT_EQ(rows[1].start_penalty_weight, 0.2);
    EXPECT_EQ(rows[0].per_seed.size(), 2u);
}
