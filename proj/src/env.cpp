#include "fqlems/env.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

#include "fqlems/errors.hpp"

namespace fqlems {

PenaltyMode parse_penalty_mode(const std::string& text) {
    if (text == "per_event") return PenaltyMode::per_event;
    if (text == "terminal_lump") return PenaltyMode::terminal_lump;
    throw ConfigError("unknown penalty mode '" + text + "' (expected per_event|terminal_lump)");
}

std::string to_string(PenaltyMode mode) {
    return mode == PenaltyMode::per_event ? "per_event" : "terminal_lump";
}

void EnvConfig::validate() const {
    if (!(soc_min >= 0.0 && soc_max <= 1.0 && soc_min < soc_max)) {
        throw ConfigError("SOC bounds must satisfy 0 <= min < max <= 1");
    }
    if (!(soc_penalty_weight >= 0.0 && start_penalty_weight >= 0.0)) {
        throw ConfigError("penalty weights must be non-negative");
    }
    if (!(start_threshold_w >= 0.0)) throw ConfigError("start threshold must be non-negative");
    if (!(initial_soc >= soc_min && initial_soc <= soc_max)) {
        throw ConfigError("initial SOC " + std::to_string(initial_soc) + " outside SOC bounds");
    }
}

Environment::Environment(const DriveCycle& cycle, const PowertrainModel& model, EnvConfig cfg)
    : cycle_(&cycle), model_(&model), cfg_(cfg) {
    cfg_.validate();
    if (cycle.power.size() != cycle.size() || cycle.size() < 2) {
        throw UsageError("environment needs a drive cycle with derived power");
    }
    reset();
}

Observation Environment::reset() { return reset(cfg_.initial_soc); }

Observation Environment::reset(double initial_soc) {
    EnvConfig probe = cfg_;
    probe.initial_soc = initial_soc;
    probe.validate();
    state_ = EnvState{};
    state_.soc = initial_soc;
    return observation();
}

Observation Environment::observation() const {
    const std::size_t k = std::min(state_.step, cycle_->size() - 1);
    return {cycle_->power[k], state_.soc};
}

StepResult Environment::step(double p_fc_cmd_w) {
    if (state_.terminal) throw UsageError("step() called on a terminated episode");

    const auto& fc = model_->fuel_cell;
    const auto& bat = model_->battery;

    StepResult out;
    out.k = state_.step;
    out.v_mps = cycle_->velocity[out.k];
    out.p_veh_w = cycle_->power[out.k];
    out.p_fc_cmd_w = std::clamp(p_fc_cmd_w, 0.0, fc.p_max_w);

    // Battery branch.
    out.p_bat_cmd_w = power_balance(out.p_veh_w, out.p_fc_cmd_w);
    out.p_bat_w = battery_bus_power(out.p_bat_cmd_w, bat);
    const double p_bat_limit = 0.99 * max_discharge_power(state_.soc, bat);
    if (out.p_bat_w > p_bat_limit) {
        out.p_bat_w = p_bat_limit;
        out.battery_saturated = true;
        ++state_.battery_saturations;
    }
    out.i_bat_a = battery_current(out.p_bat_w, state_.soc, bat);
    const SocStep soc_next = battery_step(state_.soc, out.i_bat_a, cycle_->dt, bat);
    out.soc = std::clamp(soc_next.soc, cfg_.soc_min, cfg_.soc_max);

    // Fuel-cell branch.
    double p_stack = fc_gross_power(out.p_fc_cmd_w, fc);
    if (p_stack > model_->fc_max.power_w) {
        p_stack = model_->fc_max.power_w;
        out.fc_saturated = true;
        ++state_.fc_saturations;
    }
    const double i_fc = fc_power_to_current(p_stack, fc, model_->fc_max);
    out.mdot_gps = hydrogen_rate(fc.area_cm2 * i_fc, fc, model_->hydrogen_mode);

    // Start events on the thresholded command.
    const bool on_now = out.p_fc_cmd_w >= cfg_.start_threshold_w;
    out.start_event = on_now && !state_.fc_on;
    state_.fc_on = on_now;
    if (out.start_event) ++state_.n_start;

    const double dev = out.soc - cfg_.soc_ref;
    out.base_reward = -out.mdot_gps - cfg_.soc_penalty_weight * dev * dev;

    ++state_.step;
    out.boundary_exit = out.soc <= cfg_.soc_min || out.soc >= cfg_.soc_max;
    out.terminal = out.boundary_exit || state_.step >= cycle_->size();

    if (cfg_.penalty_mode == PenaltyMode::per_event) {
        if (out.start_event) out.start_penalty = cfg_.start_penalty_weight;
    } else if (out.terminal) {
        out.start_penalty = cfg_.start_penalty_weight * state_.n_start;
    }
    out.reward = out.base_reward - out.start_penalty;

    state_.soc = out.soc;
    state_.hydrogen_g += out.mdot_gps * cycle_->dt;
    state_.reward_sum += out.reward;
    state_.terminal = out.terminal;
    state_.boundary_exit = out.boundary_exit;
    out.next = observation();
    return out;
}

double episode_return(std::span<const StepResult> log, double dt, double start_penalty_weight) {
    double integral = 0.0;
    int starts = 0;
    for (const auto& s : log) {
        integral += s.base_reward * dt;
        if (s.start_event) ++starts;
    }
    return integral - start_penalty_weight * starts;
}

void write_trajectory_csv(std::span<const StepResult> log, double dt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "k,t_s,v_mps,p_veh_w,p_fc_w,p_bat_w,i_bat_a,soc,mdot_gps,reward,start_event\n";
    out << std::setprecision(10);
    for (const auto& s : log) {
        out << s.k << ',' << dt * static_cast<double>(s.k) << ',' << s.v_mps << ',' << s.p_veh_w << ','
            << s.p_fc_cmd_w << ',' << s.p_bat_w << ',' << s.i_bat_a << ',' << s.soc << ',' << s.mdot_gps << ','
            << s.reward << ',' << (s.start_event ? 1 : 0) << '\n';
    }
}

}  // namespace fqlems
