#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fqlems/calibration.hpp"
#include "fqlems/cycle.hpp"
#include "fqlems/env.hpp"
#include "fqlems/fql.hpp"
#include "fqlems/powertrain.hpp"
#include "fqlems/trainer.hpp"

namespace fqlems {

/// Flat `key = value` configuration covering every parameter record. Starts
/// from built-in defaults (agent.seed falls back to $FQL_EMS_SEED); files and
/// explicit overrides replace values; unknown keys are rejected.
class RunConfig {
public:
    RunConfig();

    /// Reads `key = value` lines; `#` starts a comment. Relative paths in
    /// path-valued keys are resolved against the file's directory.
    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool flag(const std::string& key) const;

    /// Resolved snapshot in the same format load_file accepts.
    std::string dump() const;
    static std::vector<std::string> keys();

    VehicleParams vehicle() const;
    PowerClamp power_clamp() const;
    FuelCellParams fuel_cell() const;
    BatteryParams battery() const;
    PolarizationAnchors anchors() const;
    CalibrationOptions calibration_options() const;
    HydrogenMode hydrogen_mode() const;
    EnvConfig env() const;
    AgentConfig agent() const;
    TrainConfig train() const;
    VelocityUnit cycle_units() const;

    /// Powertrain with the fuel cell calibrated when calibration.enabled.
    PowertrainModel build_model(CalibrationReport* report = nullptr) const;

    /// Loads run.cycle (or `path` when given) and derives its power series.
    DriveCycle load_drive_cycle(const std::string& path = {}) const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace fqlems
