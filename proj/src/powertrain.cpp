#include "fqlems/powertrain.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "fqlems/errors.hpp"

namespace fqlems {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void VehicleParams::validate() const {
    require(mass_kg > 0 && frontal_area_m2 > 0 && air_density > 0 && drag_coeff > 0 && rolling_coeff > 0 &&
                gravity > 0,
            "vehicle parameters must be strictly positive");
    require(driveline_eff > 0 && driveline_eff <= 1, "driveline efficiency must lie in (0, 1]");
    require(std::isfinite(slope_rad), "slope must be finite");
}

void FuelCellParams::validate() const {
    require(n_cell > 0 && area_cm2 > 0, "fuel cell count and area must be positive");
    require(i0 > 0 && i0 < i_lim, "exchange current density must satisfy 0 < i0 < i_lim");
    require(i_loss >= 0, "loss current density must be non-negative");
    require(temperature_k > 0 && gas_const > 0 && faraday > 0 && n_electrons > 0 && transfer_coeff > 0,
            "electrochemical constants must be positive");
    require(r_ohm >= 0, "ohmic resistance must be non-negative");
    require(molar_mass_h2 > 0 && hhv_volt_equiv > 0, "hydrogen constants must be positive");
    require(!dcdc_eff.empty() && dcdc_eff.min_value() > 0 &&
                *std::max_element(dcdc_eff.ys().begin(), dcdc_eff.ys().end()) <= 1,
            "fuel cell converter efficiency must lie in (0, 1]");
    require(aux_current_a >= 0 && bus_voltage_v > 0, "auxiliary load parameters out of range");
    require(p_max_w > 0, "fuel cell power limit must be positive");
}

void BatteryParams::validate() const {
    require(capacity_as > 0, "battery capacity must be positive");
    require(!voc.empty() && voc.non_decreasing(), "V_oc table must be non-decreasing in SOC");
    require(!rbat.empty() && rbat.min_value() > 0, "battery resistance must be positive");
    require(voc.xs().front() <= 0.0 && voc.xs().back() >= 1.0 && rbat.xs().front() <= 0.0 &&
                rbat.xs().back() >= 1.0,
            "battery tables must cover SOC in [0, 1]");
    require(dcdc_eff > 0 && dcdc_eff <= 1, "battery converter efficiency must lie in (0, 1]");
    require(nominal_voltage_v > 0, "nominal voltage must be positive");
}

BatteryParams load_battery_table(const std::string& path, BatteryParams base) {
    const auto csv = detail::read_numeric_csv(path, {"soc", "voc_v", "rbat_ohm"});
    std::vector<double> soc, voc, rbat;
    for (const auto& row : csv.rows) {
        soc.push_back(row[0]);
        voc.push_back(row[1]);
        rbat.push_back(row[2]);
    }
    try {
        base.voc = LookupTable(soc, voc);
        base.rbat = LookupTable(soc, rbat);
        base.validate();
    } catch (const ConfigError& e) {
        throw ParseError(path + ": " + e.what());
    }
    return base;
}

HydrogenMode parse_hydrogen_mode(const std::string& text) {
    if (text == "stack") return HydrogenMode::stack;
    if (text == "paper_literal") return HydrogenMode::paper_literal;
    throw ConfigError("unknown hydrogen mode '" + text + "' (expected stack|paper_literal)");
}

std::string to_string(HydrogenMode mode) {
    return mode == HydrogenMode::stack ? "stack" : "paper_literal";
}

double traction_force(double v, double dv_dt, const VehicleParams& p) {
    const double weight = p.mass_kg * p.gravity;
    return 0.5 * p.drag_coeff * p.frontal_area_m2 * p.air_density * v * v +
           weight * p.rolling_coeff * std::cos(p.slope_rad) + weight * std::sin(p.slope_rad) + p.mass_kg * dv_dt;
}

double traction_power(double v, double dv_dt, const VehicleParams& p) {
    const double wheel = traction_force(v, dv_dt, p) * v;
    return wheel >= 0.0 ? wheel / p.driveline_eff : wheel * p.driveline_eff;
}

double cell_voltage(double i, const FuelCellParams& p) {
    if (!(i >= 0.0) || !(i < p.i_lim)) {
        throw DomainError("cell current density " + std::to_string(i) + " A/cm^2 outside [0, i_lim)");
    }
    const double rt = p.gas_const * p.temperature_k;
    const double activation = rt / (p.transfer_coeff * p.faraday) * std::log((i + p.i_loss) / p.i0);
    const double concentration = rt / (p.n_electrons * p.faraday) * std::log(p.i_lim / (p.i_lim - i));
    return p.e0_v + p.nernst_offset_v - activation - concentration - i * p.r_ohm;
}

StackPoint stack_output(double i, const FuelCellParams& p) {
    StackPoint out;
    out.voltage_v = p.n_cell * cell_voltage(i, p);
    out.current_a = p.area_cm2 * i;
    out.power_w = out.voltage_v * out.current_a;
    return out;
}

double hhv_efficiency(double i, const FuelCellParams& p) {
    return cell_voltage(i, p) / p.hhv_volt_equiv;
}

MaxPowerPoint max_power_point(const FuelCellParams& p) {
    constexpr int grid = 1000;
    const double top = p.i_lim * (1.0 - 1e-9);
    auto power = [&](double i) { return stack_output(i, p).power_w; };

    int best = 0;
    double best_p = power(0.0);
    for (int k = 1; k <= grid; ++k) {
        const double pk = power(top * k / grid);
        if (pk > best_p) {
            best_p = pk;
            best = k;
        }
    }
    double lo = top * std::max(best - 1, 0) / grid;
    double hi = top * std::min(best + 1, grid) / grid;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = power(x1);
    double f2 = power(x2);
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = power(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = power(x1);
        }
    }
    MaxPowerPoint mpp;
    mpp.current_density = 0.5 * (lo + hi);
    mpp.current_a = mpp.current_density * p.area_cm2;
    mpp.power_w = power(mpp.current_density);
    return mpp;
}

double fc_power_to_current(double p_w, const FuelCellParams& p, const MaxPowerPoint& mpp) {
    if (!(p_w >= 0.0) || p_w > mpp.power_w) {
        throw RangeError("stack power " + std::to_string(p_w) + " W outside [0, " + std::to_string(mpp.power_w) +
                         "] W");
    }
    if (p_w == 0.0) return 0.0;
    double lo = 0.0;
    double hi = mpp.current_density;
    double mid = hi;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double err = stack_output(mid, p).power_w - p_w;
        if (std::abs(err) < 1e-3) break;
        (err < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

double fc_power_to_current(double p_w, const FuelCellParams& p) {
    return fc_power_to_current(p_w, p, max_power_point(p));
}

double hydrogen_rate(double current_a, const FuelCellParams& p, HydrogenMode mode) {
    if (!(current_a >= 0.0)) throw RangeError("stack current must be non-negative");
    const double per_cell = p.molar_mass_h2 * current_a / (p.n_electrons * p.faraday);
    return mode == HydrogenMode::stack ? p.n_cell * per_cell : per_cell;
}

double fc_gross_power(double p_cmd_w, const FuelCellParams& p) {
    if (!(p_cmd_w >= 0.0) || p_cmd_w > p.p_max_w) {
        throw RangeError("fuel cell command " + std::to_string(p_cmd_w) + " W outside [0, " +
                         std::to_string(p.p_max_w) + "] W");
    }
    if (p_cmd_w == 0.0) return 0.0;
    return p_cmd_w / p.dcdc_eff(p_cmd_w) + p.aux_current_a * p.bus_voltage_v;
}

double battery_current(double p_bat_w, double voc_v, double r_ohm) {
    const double disc = voc_v * voc_v - 4.0 * r_ohm * p_bat_w;
    if (disc < 0.0) {
        throw InfeasiblePowerError("battery power " + std::to_string(p_bat_w) + " W exceeds V_oc^2/(4R) = " +
                                   std::to_string(voc_v * voc_v / (4.0 * r_ohm)) + " W");
    }
    // Rationalized root: avoids cancellation when p_bat_w is small.
    return 2.0 * p_bat_w / (voc_v + std::sqrt(disc));
}

double battery_current(double p_bat_w, double soc, const BatteryParams& p) {
    return battery_current(p_bat_w, p.voc(soc), p.rbat(soc));
}

double max_discharge_power(double soc, const BatteryParams& p) {
    const double voc = p.voc(soc);
    return voc * voc / (4.0 * p.rbat(soc));
}

SocStep battery_step(double soc, double current_a, double dt, const BatteryParams& p) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    const double next = soc - current_a * dt / p.capacity_as;
    SocStep out;
    out.soc = std::clamp(next, 0.0, 1.0);
    out.clamped = out.soc != next;
    return out;
}

double battery_bus_power(double p_cmd_w, const BatteryParams& p) {
    if (p_cmd_w > 0.0) return p_cmd_w / p.dcdc_eff;
    if (p_cmd_w < 0.0) return p_cmd_w * p.dcdc_eff;
    return 0.0;
}

PowertrainModel PowertrainModel::make(VehicleParams vehicle, FuelCellParams fuel_cell, BatteryParams battery,
                                      HydrogenMode mode) {
    vehicle.validate();
    fuel_cell.validate();
    battery.validate();
    PowertrainModel m;
    m.vehicle = std::move(vehicle);
    m.fuel_cell = std::move(fuel_cell);
    m.battery = std::move(battery);
    m.hydrogen_mode = mode;
    m.fc_max = max_power_point(m.fuel_cell);
    return m;
}

}  // namespace fqlems
