#pragma once

#include <string>

#include "fqlems/lookup_table.hpp"

// Physical models of the fuel-cell hybrid powertrain. Every function here is a
// pure function of its arguments; parameter records are plain values.
//
// Units are SI throughout except where the fuel-cell electrochemistry is
// conventionally written per unit electrode area (A/cm^2, Ohm*cm^2).

namespace fqlems {

struct VehicleParams {
    double mass_kg = 2500.0;
    double frontal_area_m2 = 1.8;
    double air_density = 1.25;     // kg/m^3
    double drag_coeff = 0.3;
    double rolling_coeff = 0.01;
    double driveline_eff = 0.9;    // (0, 1]
    double gravity = 9.8;          // m/s^2
    double slope_rad = 0.0;

    void validate() const;
};

struct FuelCellParams {
    double n_cell = 370.0;
    double area_cm2 = 324.0;
    double e0_v = 1.23;
    double gas_const = 8.3145;      // J/(mol K)
    double temperature_k = 333.15;
    double n_electrons = 2.0;
    double faraday = 96485.0;       // C/mol
    double transfer_coeff = 1.0;
    double i_loss = 0.002;          // A/cm^2
    double i0 = 3e-6;               // A/cm^2
    double i_lim = 1.6;             // A/cm^2
    double r_ohm = 0.12;            // Ohm cm^2, replaced by calibration
    double nernst_offset_v = 0.0;   // lumped entropy and partial-pressure terms
    double molar_mass_h2 = 2.016;   // g/mol
    double hhv_volt_equiv = 1.48;   // V
    LookupTable dcdc_eff = LookupTable::constant(0.95);  // vs. converter output power [W]
    double aux_current_a = 2.0;
    double bus_voltage_v = 244.8;
    double p_max_w = 100e3;         // admissible system power command

    void validate() const;
};

struct BatteryParams {
    double capacity_as = 6.6 * 3600.0;
    LookupTable voc{{0.0, 0.2, 0.8, 1.0}, {230.0, 230.0, 260.0, 260.0}};  // SOC -> V
    LookupTable rbat{{0.0, 1.0}, {0.15, 0.15}};                            // SOC -> Ohm
    double dcdc_eff = 0.95;
    double nominal_voltage_v = 244.8;

    void validate() const;
};

/// Replaces the V_oc and R_bat tables with the contents of a CSV file with
/// header `soc,voc_v,rbat_ohm` (SOC ascending, fraction units).
BatteryParams load_battery_table(const std::string& path, BatteryParams base = {});

enum class HydrogenMode { stack, paper_literal };

HydrogenMode parse_hydrogen_mode(const std::string& text);
std::string to_string(HydrogenMode mode);

// --- vehicle -----------------------------------------------------------------

/// Demanded electrical power of the traction motor [W]. Braking power is
/// recovered through the driveline efficiency, not amplified by it.
double traction_power(double v, double dv_dt, const VehicleParams& p);

/// Motor force [N] at speed v and acceleration dv_dt.
double traction_force(double v, double dv_dt, const VehicleParams& p);

// --- fuel cell ---------------------------------------------------------------

/// Single-cell voltage at current density i [A/cm^2]. Throws DomainError for
/// i < 0 or i >= i_lim.
double cell_voltage(double i, const FuelCellParams& p);

struct StackPoint {
    double voltage_v = 0.0;
    double current_a = 0.0;
    double power_w = 0.0;
};

StackPoint stack_output(double i, const FuelCellParams& p);

/// Efficiency referred to hydrogen's higher heating value, V_cell / 1.48.
double hhv_efficiency(double i, const FuelCellParams& p);

struct MaxPowerPoint {
    double current_density = 0.0;  // A/cm^2
    double current_a = 0.0;
    double power_w = 0.0;
};

/// Interior maximum of the stack power curve (grid scan + golden section).
MaxPowerPoint max_power_point(const FuelCellParams& p);

/// Current density delivering stack power p_w on the ascending (low current)
/// branch. Throws RangeError above the maximum stack power.
double fc_power_to_current(double p_w, const FuelCellParams& p, const MaxPowerPoint& mpp);
double fc_power_to_current(double p_w, const FuelCellParams& p);

/// Hydrogen consumption [g/s] at stack current I_fc [A].
double hydrogen_rate(double current_a, const FuelCellParams& p, HydrogenMode mode = HydrogenMode::stack);

/// Stack power needed to deliver the system command through the DC/DC
/// converter plus the auxiliary load. Zero command means the system is off.
double fc_gross_power(double p_cmd_w, const FuelCellParams& p);

// --- battery -----------------------------------------------------------------

/// Terminal current [A] drawn for terminal power p_bat_w; positive discharges.
double battery_current(double p_bat_w, double voc_v, double r_ohm);
double battery_current(double p_bat_w, double soc, const BatteryParams& p);

/// V_oc^2 / (4 R_bat) at the given SOC.
double max_discharge_power(double soc, const BatteryParams& p);

struct SocStep {
    double soc = 0.0;
    bool clamped = false;
};

SocStep battery_step(double soc, double current_a, double dt, const BatteryParams& p);

/// Battery terminal power for a converter output command. Discharging pays
/// the converter loss, charging loses it.
double battery_bus_power(double p_cmd_w, const BatteryParams& p);

/// Converter command the battery has to supply so the bus balances.
inline double power_balance(double p_veh_w, double p_fc_cmd_w) { return p_veh_w - p_fc_cmd_w; }

// --- aggregate -----------------------------------------------------------------

struct PowertrainModel {
    VehicleParams vehicle;
    FuelCellParams fuel_cell;
    BatteryParams battery;
    HydrogenMode hydrogen_mode = HydrogenMode::stack;
    MaxPowerPoint fc_max;  // cached from fuel_cell

    static PowertrainModel make(VehicleParams vehicle, FuelCellParams fuel_cell, BatteryParams battery,
                                HydrogenMode mode = HydrogenMode::stack);
};

}  // namespace fqlems
