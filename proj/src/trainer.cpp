#include "fqlems/trainer.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>

#include "fqlems/errors.hpp"

namespace fqlems {

void TrainConfig::validate() const {
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (!(0.0 <= epsilon_end && epsilon_end <= epsilon_start && epsilon_start <= 1.0)) {
        throw ConfigError("epsilon schedule must satisfy 0 <= end <= start <= 1");
    }
    agent.validate();
    env.validate();
}

double epsilon_schedule(int episode, const TrainConfig& cfg) {
    if (cfg.episodes <= 1 || cfg.epsilon_start == cfg.epsilon_end) return cfg.epsilon_start;
    if (episode >= cfg.episodes - 1) return cfg.epsilon_end;
    const double decay = std::pow(cfg.epsilon_end / cfg.epsilon_start, 1.0 / (cfg.episodes - 1));
    return cfg.epsilon_start * std::pow(decay, episode);
}

namespace {

EpisodeMetrics finish_metrics(const Environment& env, double base_sum, double initial_soc) {
    const auto& st = env.state();
    const auto& cycle = env.cycle();
    EpisodeMetrics m;
    m.initial_soc = initial_soc;
    m.steps = static_cast<int>(st.step);
    m.n_start = st.n_start;
    m.final_soc = st.soc;
    m.hydrogen_g = st.hydrogen_g;
    m.distance_km = cycle.distance_km(st.step);
    m.h2_g_per_100km = m.distance_km > 0.0 ? 100.0 * m.hydrogen_g / m.distance_km : 0.0;
    m.episode_return = base_sum * cycle.dt - env.config().start_penalty_weight * st.n_start;
    m.avg_reward = m.steps > 0 ? m.episode_return / m.steps : 0.0;
    m.completed = st.terminal && !st.boundary_exit;
    return m;
}

}  // namespace

TrainResult train(const DriveCycle& cycle, const PowertrainModel& model, const TrainConfig& cfg,
                  const EpisodeObserver& observer) {
    cfg.validate();
    TrainResult result;
    FqlAgent& agent = result.agent;
    agent.config = cfg.agent;

    Rng rng(cfg.agent.seed);
    agent.q = initial_q(agent.grid.rules(), agent.actions.size(), cfg.agent, rng);

    Environment env(cycle, model, cfg.env);
    const double p_max = model.fuel_cell.p_max_w;
    result.curve.reserve(static_cast<std::size_t>(cfg.episodes));

    for (int episode = 0; episode < cfg.episodes; ++episode) {
        const double epsilon = epsilon_schedule(episode, cfg);
        Observation obs = env.reset();
        Eigen::VectorXd phi = agent.grid.fuzzify(obs.p_veh_w, obs.soc);
        double base_sum = 0.0;

        bool terminal = false;
        while (!terminal) {
            const ActionIndices a = select_actions(agent.q, epsilon, rng, cfg.agent.epsilon_rule);
            const double command = compose_action(a, phi, agent.actions, 0.0, p_max);
            const StepResult step = env.step(command);
            const Eigen::VectorXd phi_next = agent.grid.fuzzify(step.next.p_veh_w, step.next.soc);
            td_update(agent.q, phi, a, step.reward, phi_next, step.terminal, cfg.agent.alpha, cfg.agent.gamma);
            phi = phi_next;
            base_sum += step.base_reward;
            terminal = step.terminal;
        }

        EpisodeMetrics m = finish_metrics(env, base_sum, cfg.env.initial_soc);
        m.episode = episode;
        m.epsilon = epsilon;
        if (observer) observer(m);
        result.curve.push_back(m);
    }
    return result;
}

EpisodeMetrics run_greedy_episode(const FqlAgent& agent, const DriveCycle& cycle, const PowertrainModel& model,
                                  const EnvConfig& env_cfg, double initial_soc, std::vector<StepResult>* log) {
    Environment env(cycle, model, env_cfg);
    Observation obs = env.reset(initial_soc);
    const ActionIndices greedy = greedy_actions(agent.q);
    const double p_max = model.fuel_cell.p_max_w;
    double base_sum = 0.0;
    bool terminal = false;
    while (!terminal) {
        const Eigen::VectorXd phi = agent.grid.fuzzify(obs.p_veh_w, obs.soc);
        const StepResult step = env.step(compose_action(greedy, phi, agent.actions, 0.0, p_max));
        if (log) log->push_back(step);
        base_sum += step.base_reward;
        obs = step.next;
        terminal = step.terminal;
    }
    return finish_metrics(env, base_sum, initial_soc);
}

bool EvalReport::all_completed() const {
    for (const auto& r : repetitions) {
        if (!r.completed) return false;
    }
    return !repetitions.empty();
}

EvalReport evaluate(const FqlAgent& agent, const DriveCycle& cycle, const PowertrainModel& model,
                    const EnvConfig& env_cfg, double initial_soc, int repetitions) {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    EnvConfig probe = env_cfg;
    probe.initial_soc = initial_soc;
    probe.validate();

    EvalReport report;
    report.cycle = cycle.name;
    report.initial_soc = initial_soc;
    double soc = initial_soc;
    bool failed = false;
    for (int rep = 0; rep < repetitions; ++rep) {
        EpisodeMetrics m;
        if (!failed) {
            m = run_greedy_episode(agent, cycle, model, env_cfg, soc, rep == 0 ? &report.first_trajectory : nullptr);
            soc = m.final_soc;
            failed = !m.completed;
        } else {
            m.initial_soc = soc;
            m.final_soc = soc;
        }
        m.episode = rep + 1;
        report.repetitions.push_back(m);
    }
    return report;
}

nlohmann::json to_json(const EpisodeMetrics& m) {
    return {
        {"repetition", m.episode},
        {"epsilon", m.epsilon},
        {"initial_soc", m.initial_soc},
        {"episode_return", m.episode_return},
        {"avg_reward", m.avg_reward},
        {"hydrogen_g", m.hydrogen_g},
        {"distance_km", m.distance_km},
        {"h2_g_per_100km", m.h2_g_per_100km},
        {"final_soc", m.final_soc},
        {"n_start", m.n_start},
        {"steps", m.steps},
        {"completed", m.completed},
    };
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& m : report.repetitions) reps.push_back(to_json(m));
    return {{"cycle", report.cycle}, {"initial_soc", report.initial_soc}, {"repetitions", std::move(reps)}};
}

void write_training_curve_csv(const std::vector<EpisodeMetrics>& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "episode,epsilon,avg_reward,h2_g_per_100km,final_soc,n_start,steps\n" << std::setprecision(10);
    for (const auto& m : curve) {
        out << m.episode << ',' << m.epsilon << ',' << m.avg_reward << ',' << m.h2_g_per_100km << ','
            << m.final_soc << ',' << m.n_start << ',' << m.steps << '\n';
    }
}

std::vector<StrategyRow> compare_start_penalty(const DriveCycle& cycle, const PowertrainModel& model,
                                               const TrainConfig& cfg, int seeds, double penalty_weight) {
    if (seeds < 1) throw ConfigError("seeds must be >= 1");
    const double weights[2] = {0.0, penalty_weight};
    std::vector<StrategyRow> rows(2);
    rows[0].label = "without_start_penalty";
    rows[1].label = "with_start_penalty";

    std::vector<std::future<EpisodeMetrics>> jobs[2];
    for (int s = 0; s < 2; ++s) {
        rows[s].start_penalty_weight = weights[s];
        for (int k = 0; k < seeds; ++k) {
            TrainConfig run = cfg;
            run.env.start_penalty_weight = weights[s];
            run.agent.seed = cfg.agent.seed + static_cast<std::uint64_t>(k);
            jobs[s].push_back(std::async(std::launch::async, [&cycle, &model, run] {
                const TrainResult trained = train(cycle, model, run);
                return run_greedy_episode(trained.agent, cycle, model, run.env, run.env.initial_soc);
            }));
        }
    }
    for (int s = 0; s < 2; ++s) {
        auto& row = rows[s];
        for (auto& job : jobs[s]) {
            EpisodeMetrics m = job.get();
            row.mean_n_start += m.n_start;
            row.mean_h2_g_per_100km += m.h2_g_per_100km;
            row.mean_final_soc += m.final_soc;
            if (!m.completed) ++row.failed_runs;
            row.per_seed.push_back(m);
        }
        row.mean_n_start /= seeds;
        row.mean_h2_g_per_100km /= seeds;
        row.mean_final_soc /= seeds;
    }
    return rows;
}

}  // namespace fqlems
