#pragma once

#include <span>
#include <string>
#include <vector>

#include "fqlems/cycle.hpp"
#include "fqlems/powertrain.hpp"

namespace fqlems {

/// Where the fuel-cell start penalty is paid inside an episode.
enum class PenaltyMode { per_event, terminal_lump };

PenaltyMode parse_penalty_mode(const std::string& text);
std::string to_string(PenaltyMode mode);

struct EnvConfig {
    double soc_ref = 0.5;
    double soc_penalty_weight = 200.0;
    double start_penalty_weight = 0.2;
    double start_threshold_w = 500.0;
    double soc_min = 0.0;
    double soc_max = 1.0;
    double initial_soc = 0.5;
    PenaltyMode penalty_mode = PenaltyMode::per_event;

    void validate() const;
};

struct Observation {
    double p_veh_w = 0.0;
    double soc = 0.0;
};

struct EnvState {
    std::size_t step = 0;
    double soc = 0.0;
    bool fc_on = false;
    int n_start = 0;
    double hydrogen_g = 0.0;
    double reward_sum = 0.0;
    int battery_saturations = 0;
    int fc_saturations = 0;
    bool terminal = false;
    bool boundary_exit = false;
};

struct StepResult {
    std::size_t k = 0;
    Observation next;
    double reward = 0.0;         // what the agent learns from
    double base_reward = 0.0;    // -mdot - k_soc (SOC' - ref)^2
    double start_penalty = 0.0;  // part of reward charged for starts
    bool terminal = false;
    bool boundary_exit = false;

    double v_mps = 0.0;
    double p_veh_w = 0.0;
    double p_fc_cmd_w = 0.0;
    double p_bat_cmd_w = 0.0;  // converter side, P_veh - P_fc
    double p_bat_w = 0.0;      // battery terminals, after saturation
    double i_bat_a = 0.0;
    double mdot_gps = 0.0;
    double soc = 0.0;          // after the step
    bool start_event = false;
    bool battery_saturated = false;
    bool fc_saturated = false;
};

/// One episode over a drive cycle. Holds references to the cycle and model;
/// both must outlive the environment.
class Environment {
public:
    Environment(const DriveCycle& cycle, const PowertrainModel& model, EnvConfig cfg);

    Observation reset();
    Observation reset(double initial_soc);

    /// Advances one sample. The command is clamped to [0, p_max]. Throws
    /// UsageError once the episode has terminated.
    StepResult step(double p_fc_cmd_w);

    const EnvState& state() const noexcept { return state_; }
    const EnvConfig& config() const noexcept { return cfg_; }
    const DriveCycle& cycle() const noexcept { return *cycle_; }
    Observation observation() const;

private:
    const DriveCycle* cycle_;
    const PowertrainModel* model_;
    EnvConfig cfg_;
    EnvState state_;
};

/// Episode objective: integral of the base reward minus k_start * N_start,
/// independent of how the start penalty was distributed.
double episode_return(std::span<const StepResult> log, double dt, double start_penalty_weight);

/// Per-step log `k,t_s,v_mps,p_veh_w,p_fc_w,p_bat_w,i_bat_a,soc,mdot_gps,reward,start_event`.
void write_trajectory_csv(std::span<const StepResult> log, double dt, const std::string& path);

}  // namespace fqlems
