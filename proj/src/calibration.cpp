#include "fqlems/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "fqlems/errors.hpp"

namespace fqlems {

namespace {

constexpr double kPenalty = 1e3;

// Parameter vector layout: (r_ohm, nernst_offset[, n_cell]).
FuelCellParams with_params(FuelCellParams p, const Eigen::VectorXd& x) {
    p.r_ohm = x[0];
    p.nernst_offset_v = x[1];
    if (x.size() > 2) p.n_cell = x[2];
    return p;
}

Eigen::Vector3d anchor_residuals(const FuelCellParams& p, const PolarizationAnchors& a, MaxPowerPoint* mpp_out,
                                 double* eff_out) {
    if (p.r_ohm < 0.0 || p.n_cell <= 0.0) return Eigen::Vector3d::Constant(kPenalty);
    const double i_eff = a.efficiency_current_a / p.area_cm2;
    if (i_eff >= p.i_lim) return Eigen::Vector3d::Constant(kPenalty);
    const MaxPowerPoint mpp = max_power_point(p);
    const double eff = hhv_efficiency(i_eff, p);
    if (mpp_out) *mpp_out = mpp;
    if (eff_out) *eff_out = eff;
    return {(mpp.power_w - a.max_power_w) / a.max_power_w,
            (mpp.current_a - a.max_power_current_a) / a.max_power_current_a,
            (eff - a.efficiency) / a.efficiency};
}

struct AnchorFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    FuelCellParams base;
    PolarizationAnchors anchors;
    int n_inputs;

    int inputs() const { return n_inputs; }
    int values() const { return 3; }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        fvec = anchor_residuals(with_params(base, x), anchors, nullptr, nullptr);
        return 0;
    }
};

Eigen::VectorXd refine(const FuelCellParams& base, const PolarizationAnchors& anchors, Eigen::VectorXd x) {
    AnchorFunctor f{base, anchors, static_cast<int>(x.size())};
    Eigen::NumericalDiff<AnchorFunctor> numeric(f, 1e-7);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<AnchorFunctor>> lm(numeric);
    lm.parameters.maxfev = 2000;
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-14;
    lm.minimize(x);
    return x;
}

double sum_sq(const Eigen::Vector3d& r) { return r.squaredNorm(); }

}  // namespace

double CalibrationReport::max_abs_residual() const {
    double worst = 0.0;
    for (double r : residuals) worst = std::max(worst, std::abs(r));
    return worst;
}

CalibrationReport calibrate_polarization(const FuelCellParams& start, const PolarizationAnchors& anchors,
                                         const CalibrationOptions& options) {
    start.validate();
    const bool free_n = options.free_cell_count;

    // Coarse grid over (r_ohm, offset). With a free cell count the stack power
    // scales linearly in n_cell, so n_cell is solved in closed form per point.
    Eigen::VectorXd best(free_n ? 3 : 2);
    double best_cost = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd r_grid = Eigen::VectorXd::LinSpaced(31, 0.0, 0.6);
    const Eigen::VectorXd off_grid = Eigen::VectorXd::LinSpaced(36, -0.4, 0.3);
    for (Eigen::Index a = 0; a < r_grid.size(); ++a) {
        for (Eigen::Index b = 0; b < off_grid.size(); ++b) {
            Eigen::VectorXd x(free_n ? 3 : 2);
            x[0] = r_grid[a];
            x[1] = off_grid[b];
            FuelCellParams p = with_params(start, x);
            if (free_n) {
                p.n_cell = 1.0;
                const MaxPowerPoint unit = max_power_point(p);
                if (!(unit.power_w > 0.0)) continue;
                x[2] = anchors.max_power_w / unit.power_w;
                p.n_cell = x[2];
            }
            const double cost = sum_sq(anchor_residuals(p, anchors, nullptr, nullptr));
            if (cost < best_cost) {
                best_cost = cost;
                best = x;
            }
        }
    }

    Eigen::VectorXd x = refine(start, anchors, best);
    FuelCellParams fitted = with_params(start, x);
    if (free_n) {
        // Cells are counted; snap and refit the continuous parameters.
        fitted.n_cell = std::max(1.0, std::round(x[2]));
        const Eigen::VectorXd x2 = refine(fitted, anchors, x.head<2>());
        fitted = with_params(fitted, x2);
    }

    CalibrationReport report;
    report.params = fitted;
    const Eigen::Vector3d r = anchor_residuals(fitted, anchors, &report.max_power, &report.efficiency_at_anchor);
    report.residuals.assign(r.data(), r.data() + r.size());

    if (!(report.max_abs_residual() <= options.max_residual)) {
        std::ostringstream msg;
        msg << "polarization calibration failed: residuals [";
        for (std::size_t k = 0; k < report.residuals.size(); ++k) {
            msg << (k ? ", " : "") << report.residuals[k];
        }
        msg << "] exceed " << options.max_residual;
        throw CalibrationError(msg.str(), report.residuals);
    }
    return report;
}

nlohmann::json to_json(const CalibrationReport& report) {
    return {
        {"r_ohm", report.params.r_ohm},
        {"nernst_offset", report.params.nernst_offset_v},
        {"n_cell", report.params.n_cell},
        {"residuals", report.residuals},
        {"max_power_w", report.max_power.power_w},
        {"max_power_current_a", report.max_power.current_a},
        {"efficiency_at_anchor", report.efficiency_at_anchor},
    };
}

}  // namespace fqlems
