#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fqlems/errors.hpp"
#include "json.hpp"

// Fuzzifier and weighted-average defuzzifier.
//
// Each input dimension is covered by triangular sets anchored on neighbouring
// typical values, with the outermost sets saturating outward. Memberships in a
// dimension therefore sum to one, and the algebraic-product AND keeps that
// property on the rule grid.

namespace fqlems {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
class FuzzyPartition {
public:
    FuzzyPartition() = default;

    FuzzyPartition(std::string dimension, std::vector<std::string> labels, Vector<Scalar> typicals)
        : dimension_(std::move(dimension)), labels_(std::move(labels)), typicals_(std::move(typicals)) {
        if (typicals_.size() < 1 || static_cast<std::size_t>(typicals_.size()) != labels_.size()) {
            throw ConfigError("partition '" + dimension_ + "' needs one typical value per label");
        }
        for (Eigen::Index k = 1; k < typicals_.size(); ++k) {
            if (!(typicals_[k] > typicals_[k - 1])) {
                throw ConfigError("partition '" + dimension_ + "' typical values must be strictly increasing");
            }
        }
        for (std::size_t a = 0; a < labels_.size(); ++a) {
            for (std::size_t b = a + 1; b < labels_.size(); ++b) {
                if (labels_[a] == labels_[b]) {
                    throw ConfigError("partition '" + dimension_ + "' has duplicate label " + labels_[a]);
                }
            }
        }
    }

    const std::string& dimension() const noexcept { return dimension_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const Vector<Scalar>& typicals() const noexcept { return typicals_; }
    Eigen::Index size() const noexcept { return typicals_.size(); }

    /// The (at most two) active sets for x: lower index and its degree; the
    /// upper neighbour, when it exists, holds 1 - degree.
    std::pair<Eigen::Index, Scalar> locate(Scalar x) const {
        const Eigen::Index last = size() - 1;
        if (!(x > typicals_[0])) return {0, Scalar(1)};
        if (!(x < typicals_[last])) return {last, Scalar(1)};
        Eigen::Index j = 0;
        while (!(x < typicals_[j + 1])) ++j;
        return {j, (typicals_[j + 1] - x) / (typicals_[j + 1] - typicals_[j])};
    }

    Scalar membership(Scalar x, Eigen::Index k) const {
        const auto [j, w] = locate(x);
        if (k == j) return w;
        if (k == j + 1) return Scalar(1) - w;
        return Scalar(0);
    }

    Vector<Scalar> memberships(Scalar x) const {
        Vector<Scalar> mu = Vector<Scalar>::Zero(size());
        const auto [j, w] = locate(x);
        mu[j] = w;
        if (j + 1 < size()) mu[j + 1] = Scalar(1) - w;
        return mu;
    }

private:
    std::string dimension_;
    std::vector<std::string> labels_;
    Vector<Scalar> typicals_;
};

/// One rule per (vehicle power set, SOC set) pair; rule = i_power * n_soc + i_soc.
template <typename Scalar>
class RuleGrid {
public:
    RuleGrid() = default;
    RuleGrid(FuzzyPartition<Scalar> power, FuzzyPartition<Scalar> soc)
        : power_(std::move(power)), soc_(std::move(soc)) {}

    const FuzzyPartition<Scalar>& power() const noexcept { return power_; }
    const FuzzyPartition<Scalar>& soc() const noexcept { return soc_; }

    Eigen::Index rules() const noexcept { return power_.size() * soc_.size(); }
    Eigen::Index rule_index(Eigen::Index i_power, Eigen::Index i_soc) const { return i_power * soc_.size() + i_soc; }
    std::pair<Eigen::Index, Eigen::Index> rule_coords(Eigen::Index rule) const {
        return {rule / soc_.size(), rule % soc_.size()};
    }

    /// Rule firing strengths for crisp state (P_veh [W], SOC [fraction]).
    Vector<Scalar> fuzzify(Scalar p_veh, Scalar soc) const {
        Vector<Scalar> phi = Vector<Scalar>::Zero(rules());
        const auto [jp, wp] = power_.locate(p_veh);
        const auto [js, ws] = soc_.locate(soc);
        const Scalar mp[2] = {wp, Scalar(1) - wp};
        const Scalar ms[2] = {ws, Scalar(1) - ws};
        for (int a = 0; a < 2; ++a) {
            if (jp + a >= power_.size()) break;
            for (int b = 0; b < 2; ++b) {
                if (js + b >= soc_.size()) break;
                phi[rule_index(jp + a, js + b)] = mp[a] * ms[b];
            }
        }
        return phi;
    }

private:
    FuzzyPartition<Scalar> power_;
    FuzzyPartition<Scalar> soc_;
};

/// Crisp output levels of the fuzzy action sets.
template <typename Scalar>
using ActionSet = Vector<Scalar>;

template <typename Scalar = double>
FuzzyPartition<Scalar> default_power_partition() {
    Vector<Scalar> t(7);
    t << -50e3, -20e3, -10e3, 0, 10e3, 20e3, 50e3;
    return {"p_veh_w", {"NH", "NM", "NL", "ZO", "PL", "PM", "PH"}, t};
}

template <typename Scalar = double>
FuzzyPartition<Scalar> default_soc_partition() {
    Vector<Scalar> t(5);
    t << 0.2, 0.4, 0.5, 0.6, 0.8;
    return {"soc", {"VL", "L", "M", "H", "VH"}, t};
}

template <typename Scalar = double>
RuleGrid<Scalar> default_rule_grid() {
    return {default_power_partition<Scalar>(), default_soc_partition<Scalar>()};
}

template <typename Scalar = double>
ActionSet<Scalar> default_action_set() {
    ActionSet<Scalar> u(8);
    u << 0, 1e3, 2e3, 5e3, 10e3, 20e3, 50e3, 100e3;
    return u;
}

/// Weighted-average defuzzification sum(y_i phi_i) / sum(phi_i).
template <typename DerivedY, typename DerivedPhi>
typename DerivedY::Scalar defuzzify(const Eigen::MatrixBase<DerivedY>& values,
                                    const Eigen::MatrixBase<DerivedPhi>& phi) {
    using Scalar = typename DerivedY::Scalar;
    const Scalar total = phi.sum();
    if (!(total > Scalar(0))) throw DegenerateError("defuzzify: firing strengths sum to zero");
    return values.dot(phi) / total;
}

template <typename Scalar>
nlohmann::json to_json(const FuzzyPartition<Scalar>& p) {
    std::vector<Scalar> typicals(p.typicals().data(), p.typicals().data() + p.size());
    return {{"dimension", p.dimension()}, {"labels", p.labels()}, {"typicals", typicals}};
}

template <typename Scalar = double>
FuzzyPartition<Scalar> partition_from_json(const nlohmann::json& j) {
    const auto typicals = j.at("typicals").get<std::vector<Scalar>>();
    return {j.at("dimension").get<std::string>(), j.at("labels").get<std::vector<std::string>>(),
            Eigen::Map<const Vector<Scalar>>(typicals.data(), static_cast<Eigen::Index>(typicals.size()))};
}

}  // namespace fqlems
