#include "fqlems/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "csv.hpp"
#include "fqlems/errors.hpp"

namespace fqlems {

VelocityUnit parse_velocity_unit(const std::string& text) {
    if (text == "mps") return VelocityUnit::mps;
    if (text == "kmh") return VelocityUnit::kmh;
    throw ConfigError("unknown velocity unit '" + text + "' (expected mps|kmh)");
}

double DriveCycle::distance_km(std::size_t steps) const {
    double metres = 0.0;
    for (std::size_t k = 0; k < std::min(steps, size()); ++k) metres += velocity[k] * dt;
    return metres / 1000.0;
}

DriveCycle make_cycle(std::string name, double dt, std::vector<double> velocity_mps) {
    if (!(dt > 0.0)) throw ParseError(name + ": sample period must be positive");
    if (velocity_mps.size() < 2) throw ParseError(name + ": a drive cycle needs at least two samples");
    for (std::size_t k = 0; k < velocity_mps.size(); ++k) {
        if (!(velocity_mps[k] >= 0.0)) {
            throw ParseError(name + ": negative velocity at sample " + std::to_string(k));
        }
    }
    DriveCycle c;
    c.name = std::move(name);
    c.dt = dt;
    c.velocity = std::move(velocity_mps);
    return c;
}

DriveCycle load_cycle(const std::string& path, VelocityUnit unit) {
    const auto csv = detail::read_numeric_csv(path, {"t_s", "v"});
    if (csv.rows.size() < 2) throw ParseError(path + ": a drive cycle needs at least two samples");

    const double dt = csv.rows[1][0] - csv.rows[0][0];
    if (!(dt > 0.0)) throw ParseError(path + ": time must be strictly increasing");
    std::vector<double> v;
    v.reserve(csv.rows.size());
    for (std::size_t k = 0; k < csv.rows.size(); ++k) {
        if (k > 0) {
            const double step = csv.rows[k][0] - csv.rows[k - 1][0];
            if (!(step > 0.0)) throw ParseError(path + ": time must be strictly increasing");
            if (std::abs(step - dt) > 1e-6) {
                throw ParseError(path + ": non-uniform sampling at row " + std::to_string(k + 1));
            }
        }
        const double speed = csv.rows[k][1];
        if (speed < 0.0) throw ParseError(path + ": negative velocity at row " + std::to_string(k + 1));
        v.push_back(unit == VelocityUnit::kmh ? speed / 3.6 : speed);
    }
    return make_cycle(std::filesystem::path(path).stem().string(), dt, std::move(v));
}

DriveCycle derive_power(DriveCycle cycle, const VehicleParams& p, const PowerClamp& clamp) {
    const std::size_t n = cycle.size();
    cycle.accel.assign(n, 0.0);
    cycle.power.assign(n, 0.0);
    cycle.power_saturations = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) cycle.accel[k] = (cycle.velocity[k] - cycle.velocity[k - 1]) / cycle.dt;
        const double raw = traction_power(cycle.velocity[k], cycle.accel[k], p);
        const double clipped = std::clamp(raw, clamp.min_w, clamp.max_w);
        if (clipped != raw) ++cycle.power_saturations;
        cycle.power[k] = clipped;
    }
    return cycle;
}

void write_cycle_csv(const DriveCycle& cycle, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "t_s,v\n" << std::setprecision(17);
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        out << cycle.dt * static_cast<double>(k) << ',' << cycle.velocity[k] << '\n';
    }
}

nlohmann::json cycle_summary(const DriveCycle& cycle) {
    const bool have_power = cycle.power.size() == cycle.size();
    return {
        {"name", cycle.name},
        {"duration_s", cycle.duration_s()},
        {"distance_km", cycle.distance_km()},
        {"p_min_w", have_power ? *std::min_element(cycle.power.begin(), cycle.power.end()) : 0.0},
        {"p_max_w", have_power ? *std::max_element(cycle.power.begin(), cycle.power.end()) : 0.0},
    };
}

}  // namespace fqlems
