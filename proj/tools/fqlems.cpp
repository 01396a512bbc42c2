// Command-line front end: train, eval, calibrate, compare, summary.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fqlems/calibration.hpp"
#include "fqlems/config.hpp"
#include "fqlems/cycle.hpp"
#include "fqlems/errors.hpp"
#include "fqlems/trainer.hpp"

namespace fs = std::filesystem;
using namespace fqlems;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string config;
    std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "flat key = value configuration file");
    cmd->add_option("--set", opts.overrides, "override one configuration key (key=value), repeatable");
}

RunConfig resolve(const CommonOptions& opts) {
    RunConfig cfg;
    if (!opts.config.empty()) {
        if (!fs::exists(opts.config)) throw ConfigError("config file not found: " + opts.config);
        cfg.load_file(opts.config);
    }
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path out(dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    return out;
}

int cmd_train(const CommonOptions& common, const std::string& cycle_path, std::optional<int> episodes,
              std::optional<long long> seed, const std::string& out_dir, bool paper_epsilon, bool quiet) {
    RunConfig cfg = resolve(common);
    if (!cycle_path.empty()) cfg.set("run.cycle", cycle_path);
    if (episodes) cfg.set("train.episodes", std::to_string(*episodes));
    if (seed) cfg.set("agent.seed", std::to_string(*seed));
    if (paper_epsilon) cfg.set("agent.epsilon_rule", "paper_literal");

    const TrainConfig train_cfg = cfg.train();
    const DriveCycle cycle = cfg.load_drive_cycle();
    const PowertrainModel model = cfg.build_model();
    const fs::path out = prepare_out_dir(out_dir);
    write_text(out / "resolved_config.cfg", cfg.dump());

    const TrainResult result = train(cycle, model, train_cfg, [&](const EpisodeMetrics& m) {
        if (quiet) return;
        if ((m.episode + 1) % 100 == 0 || m.episode + 1 == train_cfg.episodes) {
            std::cerr << "episode " << m.episode + 1 << "/" << train_cfg.episodes << "  eps " << std::setprecision(4)
                      << m.epsilon << "  avg_reward " << m.avg_reward << "  h2 " << m.h2_g_per_100km
                      << " g/100km  final_soc " << m.final_soc << "  starts " << m.n_start << "  steps " << m.steps
                      << '\n';
        }
    });
    save_agent(result.agent, (out / "agent.json").string());
    write_training_curve_csv(result.curve, (out / "training_curve.csv").string());
    std::cout << "wrote " << (out / "agent.json").string() << ", " << (out / "training_curve.csv").string()
              << ", " << (out / "resolved_config.cfg").string() << '\n';
    return 0;
}

int cmd_eval(const CommonOptions& common, const std::string& agent_path, const std::string& cycle_path,
             std::optional<double> soc0, int repeat, const std::string& out_dir) {
    RunConfig cfg = resolve(common);
    if (!cycle_path.empty()) cfg.set("run.cycle", cycle_path);
    if (soc0) {
        std::ostringstream s;
        s << std::setprecision(17) << *soc0;
        cfg.set("env.initial_soc", s.str());
    }
    if (repeat < 1) throw ConfigError("--repeat must be >= 1");
    const EnvConfig env_cfg = cfg.env();

    if (!fs::exists(agent_path)) throw ConfigError("agent file not found: " + agent_path);
    const FqlAgent agent = load_agent(agent_path, default_rule_grid<double>().rules(), default_action_set<double>().size());
    const DriveCycle cycle = cfg.load_drive_cycle();
    const PowertrainModel model = cfg.build_model();

    const EvalReport report = evaluate(agent, cycle, model, env_cfg, env_cfg.initial_soc, repeat);
    const fs::path out = prepare_out_dir(out_dir);
    write_text(out / "resolved_config.cfg", cfg.dump());
    write_text(out / "eval_report.json", to_json(report).dump(2) + "\n");
    write_trajectory_csv(report.first_trajectory, cycle.dt, (out / "trajectory.csv").string());

    std::cout << "rep  avg_reward  h2_g/100km  final_soc  starts  steps  completed\n";
    for (const auto& m : report.repetitions) {
        std::cout << std::setw(3) << m.episode << "  " << std::setw(10) << std::fixed << std::setprecision(4)
                  << m.avg_reward << "  " << std::setw(10) << std::setprecision(2) << m.h2_g_per_100km << "  "
                  << std::setw(9) << std::setprecision(4) << m.final_soc << "  " << std::setw(6) << m.n_start << "  "
                  << std::setw(5) << m.steps << "  " << (m.completed ? "yes" : "no") << '\n';
    }
    return report.all_completed() ? 0 : kExitRuntime;
}

int cmd_calibrate(const CommonOptions& common, const std::string& out_path) {
    const RunConfig cfg = resolve(common);
    const CalibrationReport report =
        calibrate_polarization(cfg.fuel_cell(), cfg.anchors(), cfg.calibration_options());
    const std::string text = to_json(report).dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        const fs::path out(out_path);
        if (out.has_parent_path()) prepare_out_dir(out.parent_path().string());
        write_text(out, text);
        write_text(out.parent_path() / "resolved_config.cfg", cfg.dump());
    }
    return 0;
}

int cmd_compare(const CommonOptions& common, const std::string& cycle_path, int seeds, std::optional<int> episodes,
                std::optional<long long> seed, const std::string& out_dir) {
    RunConfig cfg = resolve(common);
    if (!cycle_path.empty()) cfg.set("run.cycle", cycle_path);
    if (episodes) cfg.set("train.episodes", std::to_string(*episodes));
    if (seed) cfg.set("agent.seed", std::to_string(*seed));
    if (seeds < 1) throw ConfigError("--seeds must be >= 1");

    const TrainConfig train_cfg = cfg.train();
    const DriveCycle cycle = cfg.load_drive_cycle();
    const PowertrainModel model = cfg.build_model();
    const double penalty = train_cfg.env.start_penalty_weight > 0.0 ? train_cfg.env.start_penalty_weight : 0.2;
    const auto rows = compare_start_penalty(cycle, model, train_cfg, seeds, penalty);

    std::cout << "strategy                k_start  mean_n_start  mean_h2_g/100km  mean_final_soc  failed\n";
    for (const auto& r : rows) {
        std::cout << std::left << std::setw(22) << r.label << std::right << "  " << std::setw(7) << std::fixed
                  << std::setprecision(2) << r.start_penalty_weight << "  " << std::setw(12) << r.mean_n_start
                  << "  " << std::setw(15) << r.mean_h2_g_per_100km << "  " << std::setw(14)
                  << std::setprecision(4) << r.mean_final_soc << "  " << std::setw(6) << r.failed_runs << '\n';
    }
    if (!out_dir.empty()) {
        const fs::path out = prepare_out_dir(out_dir);
        write_text(out / "resolved_config.cfg", cfg.dump());
        std::ofstream csv(out / "compare.csv");
        csv << "strategy,k_start,mean_n_start,mean_h2_g_per_100km,mean_final_soc,failed_runs\n"
            << std::setprecision(10);
        for (const auto& r : rows) {
            csv << r.label << ',' << r.start_penalty_weight << ',' << r.mean_n_start << ','
                << r.mean_h2_g_per_100km << ',' << r.mean_final_soc << ',' << r.failed_runs << '\n';
        }
    }
    return 0;
}

int cmd_summary(const CommonOptions& common, const std::string& cycle_path) {
    RunConfig cfg = resolve(common);
    if (!cycle_path.empty()) cfg.set("run.cycle", cycle_path);
    std::cout << cycle_summary(cfg.load_drive_cycle()).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuzzy Q-learning energy management for fuel-cell hybrid vehicles"};
    app.require_subcommand(1);

    CommonOptions train_common, eval_common, cal_common, cmp_common, sum_common;
    std::string cycle, out_dir, agent_path, out_path;
    std::optional<int> episodes;
    std::optional<long long> seed;
    std::optional<double> soc0;
    int repeat = 10;
    int seeds = 5;
    bool paper_epsilon = false;
    bool quiet = false;

    auto* train_cmd = app.add_subcommand("train", "train an agent on a drive cycle");
    add_common(train_cmd, train_common);
    train_cmd->add_option("--cycle", cycle, "drive cycle CSV (t_s,v)");
    train_cmd->add_option("--episodes", episodes, "number of training episodes");
    train_cmd->add_option("--seed", seed, "rng seed (falls back to $FQL_EMS_SEED)");
    train_cmd->add_option("--out-dir", out_dir, "output directory")->required();
    train_cmd->add_flag("--paper-literal-epsilon", paper_epsilon, "exploit when epsilon >= draw (printed rule)");
    train_cmd->add_flag("--quiet", quiet, "no progress output");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained agent greedily");
    add_common(eval_cmd, eval_common);
    eval_cmd->add_option("--agent", agent_path, "agent JSON file")->required();
    eval_cmd->add_option("--cycle", cycle, "drive cycle CSV (t_s,v)");
    eval_cmd->add_option("--soc0", soc0, "initial SOC (fraction)");
    eval_cmd->add_option("--repeat", repeat, "consecutive cycle repetitions");
    eval_cmd->add_option("--out-dir", out_dir, "output directory")->required();

    auto* cal_cmd = app.add_subcommand("calibrate", "fit the polarization curve to its anchors");
    add_common(cal_cmd, cal_common);
    cal_cmd->add_option("--out", out_path, "calibration JSON (default: stdout)");

    auto* cmp_cmd = app.add_subcommand("compare", "paired training with and without the start penalty");
    add_common(cmp_cmd, cmp_common);
    cmp_cmd->add_option("--cycle", cycle, "drive cycle CSV (t_s,v)");
    cmp_cmd->add_option("--seeds", seeds, "number of seeds per strategy");
    cmp_cmd->add_option("--episodes", episodes, "number of training episodes");
    cmp_cmd->add_option("--seed", seed, "first seed");
    cmp_cmd->add_option("--out-dir", out_dir, "optional output directory for compare.csv");

    auto* sum_cmd = app.add_subcommand("summary", "print a drive cycle summary as JSON");
    add_common(sum_cmd, sum_common);
    sum_cmd->add_option("--cycle", cycle, "drive cycle CSV (t_s,v)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*train_cmd) return cmd_train(train_common, cycle, episodes, seed, out_dir, paper_epsilon, quiet);
        if (*eval_cmd) return cmd_eval(eval_common, agent_path, cycle, soc0, repeat, out_dir);
        if (*cal_cmd) return cmd_calibrate(cal_common, out_path);
        if (*cmp_cmd) return cmd_compare(cmp_common, cycle, seeds, episodes, seed, out_dir);
        if (*sum_cmd) return cmd_summary(sum_common, cycle);
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ShapeMismatchError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
