#pragma once

#include <string>
#include <vector>

#include "fqlems/powertrain.hpp"
#include "json.hpp"

namespace fqlems {

enum class VelocityUnit { mps, kmh };

VelocityUnit parse_velocity_unit(const std::string& text);

/// Uniformly sampled speed trace and the traction power it demands.
struct DriveCycle {
    std::string name;
    double dt = 1.0;                 // s
    std::vector<double> velocity;    // m/s
    std::vector<double> accel;       // m/s^2, backward difference
    std::vector<double> power;       // W, clamped to the power range
    int power_saturations = 0;       // samples clipped by the clamp

    std::size_t size() const noexcept { return velocity.size(); }
    double duration_s() const noexcept { return dt * static_cast<double>(size() - 1); }
    /// Distance over `steps` samples [km] (each sample held for dt).
    double distance_km(std::size_t steps) const;
    double distance_km() const { return distance_km(size()); }
};

/// Reads a `t_s,v` CSV. Times must be strictly increasing and uniformly spaced
/// within 1e-6 s; speeds non-negative; at least two samples.
DriveCycle load_cycle(const std::string& path, VelocityUnit unit = VelocityUnit::mps);

/// Builds a cycle from raw samples (same validation as load_cycle).
DriveCycle make_cycle(std::string name, double dt, std::vector<double> velocity_mps);

struct PowerClamp {
    double min_w = -50e3;
    double max_w = 50e3;
};

/// Fills accel and power from the velocity trace.
DriveCycle derive_power(DriveCycle cycle, const VehicleParams& p, const PowerClamp& clamp = {});

/// Writes the cycle back as a `t_s,v` CSV in m/s.
void write_cycle_csv(const DriveCycle& cycle, const std::string& path);

nlohmann::json cycle_summary(const DriveCycle& cycle);

}  // namespace fqlems
