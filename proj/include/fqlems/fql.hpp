#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "fqlems/errors.hpp"
#include "fqlems/fis.hpp"
#include "json.hpp"

// Fuzzy Q-learning: one row of action values per rule, per-rule epsilon-greedy
// selection, crisp action by weighted average, and the TD(0) update applied to
// the executed entry of every fired rule.

namespace fqlems {

/// Value estimates, one row per rule and one column per fuzzy action.
template <typename Scalar>
using QArray = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Executed fuzzy action index per rule (0-based).
using ActionIndices = Eigen::VectorXi;

/// Seeded uniform source with a fixed draw discipline. Conversions are done
/// here rather than through <random> distributions so streams are identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        ++draws_;
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), consuming one draw.
    int index(int n) { return std::min(static_cast<int>(uniform() * n), n - 1); }

    std::uint64_t draws() const noexcept { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

/// How the per-rule exploration draw is compared against epsilon.
enum class EpsilonRule {
    explore_below,   // random action with probability epsilon
    paper_literal,   // greedy when epsilon >= draw, i.e. random with probability 1 - epsilon
};

struct AgentConfig {
    double alpha = 0.005;
    double gamma = 0.999;
    std::uint64_t seed = 0;
    EpsilonRule epsilon_rule = EpsilonRule::explore_below;
    double q_init_min = -130.0;
    double q_init_max = -130.0;

    void validate() const {
        if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("learning rate must lie in [0, 1)");
        if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("discount must lie in [0, 1)");
        if (!(q_init_min <= q_init_max)) throw ConfigError("q init range is empty");
    }
};

/// argmax per rule, ties to the lowest action index.
template <typename Scalar>
ActionIndices greedy_actions(const QArray<Scalar>& q) {
    ActionIndices a(q.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < q.cols(); ++j) {
            if (q(i, j) > q(i, best)) best = j;
        }
        a[i] = static_cast<int>(best);
    }
    return a;
}

/// Per-rule epsilon-greedy. Draw discipline, in rule order: one uniform per
/// rule, plus one more for the random index when that rule explores.
template <typename Scalar>
ActionIndices select_actions(const QArray<Scalar>& q, double epsilon, Rng& rng,
                             EpsilonRule rule = EpsilonRule::explore_below) {
    ActionIndices a = greedy_actions(q);
    const int n = static_cast<int>(q.cols());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const double u = rng.uniform();
        const bool explore = rule == EpsilonRule::explore_below ? u < epsilon : !(epsilon >= u);
        if (explore) a[i] = rng.index(n);
    }
    return a;
}

/// Crisp command: weighted average of the selected action levels, clamped.
template <typename Scalar, typename DerivedPhi>
Scalar compose_action(const ActionIndices& a, const Eigen::MatrixBase<DerivedPhi>& phi, const ActionSet<Scalar>& u,
                      Scalar lo, Scalar hi) {
    Vector<Scalar> levels(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) levels[i] = u[a[i]];
    return std::clamp(defuzzify(levels, phi), lo, hi);
}

/// Q(phi, a): firing-weighted average of the selected entries.
template <typename Scalar, typename DerivedPhi>
Scalar q_of_selection(const Eigen::MatrixBase<DerivedPhi>& phi, const ActionIndices& a, const QArray<Scalar>& q) {
    Vector<Scalar> picked(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) picked[i] = q(i, a[i]);
    return defuzzify(picked, phi);
}

/// V(phi'): firing-weighted average of the per-rule maxima.
template <typename Scalar, typename DerivedPhi>
Scalar state_value(const Eigen::MatrixBase<DerivedPhi>& phi_next, const QArray<Scalar>& q) {
    const Vector<Scalar> row_max = q.rowwise().maxCoeff();
    return defuzzify(row_max, phi_next);
}

/// TD(0) step on the executed entries. Returns the TD error. Rules with zero
/// firing strength are left bitwise untouched.
template <typename Scalar, typename DerivedPhi, typename DerivedNext>
Scalar td_update(QArray<Scalar>& q, const Eigen::MatrixBase<DerivedPhi>& phi, const ActionIndices& a, Scalar reward,
                 const Eigen::MatrixBase<DerivedNext>& phi_next, bool terminal, Scalar alpha, Scalar gamma) {
    const Scalar bootstrap = terminal ? Scalar(0) : gamma * state_value(phi_next, q);
    const Scalar delta = reward + bootstrap - q_of_selection(phi, a, q);
    const Scalar total = phi.sum();
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        if (phi[i] > Scalar(0)) q(i, a[i]) += alpha * delta * phi[i] / total;
    }
    return delta;
}

/// Everything needed to act: learned values plus the fuzzifier they refer to.
struct FqlAgent {
    QArray<double> q;
    AgentConfig config;
    RuleGrid<double> grid = default_rule_grid<double>();
    ActionSet<double> actions = default_action_set<double>();
};

/// Uniform initialization in [q_init_min, q_init_max], row-major draw order.
QArray<double> initial_q(Eigen::Index rules, Eigen::Index actions, const AgentConfig& cfg, Rng& rng);

nlohmann::json to_json(const FqlAgent& agent);
FqlAgent agent_from_json(const nlohmann::json& j);

/// Writes the agent file; identical agents give byte-identical files.
void save_agent(const FqlAgent& agent, const std::string& path);

/// Loads an agent and checks its (rules, actions) shape against the expected
/// grid. Throws ShapeMismatchError on disagreement, ParseError on bad input.
FqlAgent load_agent(const std::string& path, Eigen::Index expected_rules, Eigen::Index expected_actions);

}  // namespace fqlems
