#pragma once

#include <vector>

#include "fqlems/powertrain.hpp"
#include "json.hpp"

namespace fqlems {

/// Targets read off the published polarization/efficiency curve.
struct PolarizationAnchors {
    double max_power_w = 104e3;
    double max_power_current_a = 437.0;
    double efficiency_current_a = 63.2;
    double efficiency = 0.5449;  // HHV referred
};

struct CalibrationOptions {
    bool free_cell_count = true;  // otherwise n_cell stays as given
    double max_residual = 0.05;   // relative, per anchor
};

struct CalibrationReport {
    FuelCellParams params;
    /// Relative errors: max power, max-power current, efficiency at anchor.
    std::vector<double> residuals;
    MaxPowerPoint max_power;
    double efficiency_at_anchor = 0.0;

    double max_abs_residual() const;
};

/// Fits R_ohm and the lumped Nernst offset (and the cell count when free) so
/// the stack reproduces the anchors. Coarse grid, then Levenberg-Marquardt.
/// Throws CalibrationError when any residual exceeds options.max_residual.
CalibrationReport calibrate_polarization(const FuelCellParams& start, const PolarizationAnchors& anchors = {},
                                         const CalibrationOptions& options = {});

nlohmann::json to_json(const CalibrationReport& report);

}  // namespace fqlems
