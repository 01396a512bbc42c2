#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fqlems/cycle.hpp"
#include "fqlems/env.hpp"
#include "fqlems/fql.hpp"
#include "json.hpp"

namespace fqlems {

struct TrainConfig {
    int episodes = 1000;
    double epsilon_start = 1.0;
    double epsilon_end = 0.001;
    AgentConfig agent;
    EnvConfig env;

    void validate() const;
};

/// Exponential decay from epsilon_start at episode 0 to epsilon_end at the
/// last episode.
double epsilon_schedule(int episode, const TrainConfig& cfg);

struct EpisodeMetrics {
    int episode = 0;
    double epsilon = 0.0;
    double initial_soc = 0.0;
    double episode_return = 0.0;
    double avg_reward = 0.0;  // episode_return / steps
    double hydrogen_g = 0.0;
    double distance_km = 0.0;
    double h2_g_per_100km = 0.0;
    double final_soc = 0.0;
    int n_start = 0;
    int steps = 0;
    bool completed = false;  // false on boundary exit (or never run)
};

struct TrainResult {
    FqlAgent agent;
    std::vector<EpisodeMetrics> curve;
};

using EpisodeObserver = std::function<void(const EpisodeMetrics&)>;

/// Runs cfg.episodes episodes of fuzzify / select / compose / step / update.
/// Fully determined by (cfg, cycle, model).
TrainResult train(const DriveCycle& cycle, const PowertrainModel& model, const TrainConfig& cfg,
                  const EpisodeObserver& observer = {});

/// Greedy roll-out of a frozen agent. The log receives every step when given.
EpisodeMetrics run_greedy_episode(const FqlAgent& agent, const DriveCycle& cycle, const PowertrainModel& model,
                                  const EnvConfig& env_cfg, double initial_soc,
                                  std::vector<StepResult>* log = nullptr);

struct EvalReport {
    std::string cycle;
    double initial_soc = 0.0;
    std::vector<EpisodeMetrics> repetitions;
    std::vector<StepResult> first_trajectory;

    bool all_completed() const;
};

/// Consecutive greedy repetitions of the cycle with SOC carried over. A
/// boundary exit marks that repetition failed; later ones are not run.
EvalReport evaluate(const FqlAgent& agent, const DriveCycle& cycle, const PowertrainModel& model,
                    const EnvConfig& env_cfg, double initial_soc, int repetitions);

nlohmann::json to_json(const EpisodeMetrics& m);
nlohmann::json to_json(const EvalReport& report);

/// `episode,epsilon,avg_reward,h2_g_per_100km,final_soc,n_start,steps`
void write_training_curve_csv(const std::vector<EpisodeMetrics>& curve, const std::string& path);

struct StrategyRow {
    std::string label;
    double start_penalty_weight = 0.0;
    double mean_n_start = 0.0;
    double mean_h2_g_per_100km = 0.0;
    double mean_final_soc = 0.0;
    int failed_runs = 0;
    std::vector<EpisodeMetrics> per_seed;
};

/// Trains with and without the start penalty for seeds base_seed..base_seed+n-1
/// and evaluates each greedy agent once on the cycle. Trainings run
/// concurrently; every one of them is sequential and seeded.
std::vector<StrategyRow> compare_start_penalty(const DriveCycle& cycle, const PowertrainModel& model,
                                               const TrainConfig& cfg, int seeds, double penalty_weight = 0.2);

}  // namespace fqlems
