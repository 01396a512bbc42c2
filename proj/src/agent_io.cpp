#include <fstream>

#include "fqlems/fql.hpp"

namespace fqlems {

QArray<double> initial_q(Eigen::Index rules, Eigen::Index actions, const AgentConfig& cfg, Rng& rng) {
    QArray<double> q(rules, actions);
    const double span = cfg.q_init_max - cfg.q_init_min;
    for (Eigen::Index i = 0; i < rules; ++i) {
        for (Eigen::Index j = 0; j < actions; ++j) q(i, j) = cfg.q_init_min + span * rng.uniform();
    }
    return q;
}

nlohmann::json to_json(const FqlAgent& agent) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < agent.q.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < agent.q.cols(); ++j) row.push_back(agent.q(i, j));
        rows.push_back(std::move(row));
    }
    std::vector<double> levels(agent.actions.data(), agent.actions.data() + agent.actions.size());
    return {
        {"m", agent.q.rows()},
        {"n", agent.q.cols()},
        {"alpha", agent.config.alpha},
        {"gamma", agent.config.gamma},
        {"seed", agent.config.seed},
        {"epsilon_rule", agent.config.epsilon_rule == EpsilonRule::paper_literal ? "paper_literal" : "explore_below"},
        {"q_init", {agent.config.q_init_min, agent.config.q_init_max}},
        {"q", std::move(rows)},
        {"partitions", {{"p_veh", to_json(agent.grid.power())}, {"soc", to_json(agent.grid.soc())}}},
        {"action_set", levels},
    };
}

FqlAgent agent_from_json(const nlohmann::json& j) {
    FqlAgent agent;
    agent.config.alpha = j.at("alpha").get<double>();
    agent.config.gamma = j.at("gamma").get<double>();
    agent.config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("epsilon_rule") && j.at("epsilon_rule").get<std::string>() == "paper_literal") {
        agent.config.epsilon_rule = EpsilonRule::paper_literal;
    }
    if (j.contains("q_init")) {
        agent.config.q_init_min = j.at("q_init").at(0).get<double>();
        agent.config.q_init_max = j.at("q_init").at(1).get<double>();
    }
    agent.grid = RuleGrid<double>(partition_from_json<double>(j.at("partitions").at("p_veh")),
                                  partition_from_json<double>(j.at("partitions").at("soc")));
    const auto levels = j.at("action_set").get<std::vector<double>>();
    agent.actions = Eigen::Map<const Eigen::VectorXd>(levels.data(), static_cast<Eigen::Index>(levels.size()));

    const auto m = j.at("m").get<Eigen::Index>();
    const auto n = j.at("n").get<Eigen::Index>();
    const auto& rows = j.at("q");
    if (static_cast<Eigen::Index>(rows.size()) != m || m != agent.grid.rules() ||
        n != agent.actions.size()) {
        throw ShapeMismatchError("agent file q-array does not match its own partitions/action set");
    }
    agent.q.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& row = rows.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != n) throw ShapeMismatchError("ragged q-array row");
        for (Eigen::Index c = 0; c < n; ++c) agent.q(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    agent.config.validate();
    return agent;
}

void save_agent(const FqlAgent& agent, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << to_json(agent).dump(2) << '\n';
    if (!out) throw Error("write failed: " + path);
}

FqlAgent load_agent(const std::string& path, Eigen::Index expected_rules, Eigen::Index expected_actions) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    FqlAgent agent;
    try {
        agent = agent_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (agent.q.rows() != expected_rules || agent.q.cols() != expected_actions) {
        throw ShapeMismatchError(path + ": agent is " + std::to_string(agent.q.rows()) + "x" +
                                 std::to_string(agent.q.cols()) + ", expected " + std::to_string(expected_rules) +
                                 "x" + std::to_string(expected_actions));
    }
    return agent;
}

}  // namespace fqlems
