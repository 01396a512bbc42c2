#include "fqlems/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "fqlems/errors.hpp"

namespace fqlems {

namespace {

// Key, default value. Order here is the order of dump().
const std::vector<std::pair<std::string, std::string>>& defaults() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"run.cycle", FQLEMS_DATA_DIR "/cycles/udds.csv"},
        {"cycle.units", "mps"},
        {"cycle.p_min_w", "-50000"},
        {"cycle.p_max_w", "50000"},

        {"vehicle.mass_kg", "2500"},
        {"vehicle.frontal_area_m2", "1.8"},
        {"vehicle.air_density", "1.25"},
        {"vehicle.drag_coeff", "0.3"},
        {"vehicle.rolling_coeff", "0.01"},
        {"vehicle.driveline_eff", "0.9"},
        {"vehicle.gravity", "9.8"},
        {"vehicle.slope_rad", "0"},

        {"fc.n_cell", "370"},
        {"fc.area_cm2", "324"},
        {"fc.e0_v", "1.23"},
        {"fc.gas_const", "8.3145"},
        {"fc.temperature_k", "333.15"},
        {"fc.n_electrons", "2"},
        {"fc.faraday", "96485"},
        {"fc.transfer_coeff", "1"},
        {"fc.i_loss", "0.002"},
        {"fc.i0", "3e-6"},
        {"fc.i_lim", "1.6"},
        {"fc.r_ohm", "0.12"},
        {"fc.nernst_offset_v", "0"},
        {"fc.molar_mass_h2", "2.016"},
        {"fc.hhv_volt_equiv", "1.48"},
        {"fc.dcdc_eff", "0.95"},
        {"fc.dcdc_eff_table", ""},
        {"fc.aux_current_a", "2"},
        {"fc.bus_voltage_v", "244.8"},
        {"fc.p_max_w", "100000"},

        {"calibration.enabled", "true"},
        {"calibration.free_cell_count", "true"},
        {"calibration.max_residual", "0.05"},
        {"calibration.max_power_w", "104000"},
        {"calibration.max_power_current_a", "437"},
        {"calibration.efficiency_current_a", "63.2"},
        {"calibration.efficiency", "0.5449"},

        {"battery.capacity_as", "23760"},
        {"battery.table", ""},
        {"battery.dcdc_eff", "0.95"},
        {"battery.nominal_voltage_v", "244.8"},

        {"env.soc_ref", "0.5"},
        {"env.soc_penalty_weight", "200"},
        {"env.start_penalty_weight", "0.2"},
        {"env.start_threshold_w", "500"},
        {"env.soc_min", "0"},
        {"env.soc_max", "1"},
        {"env.initial_soc", "0.5"},
        {"env.hydrogen_mode", "stack"},
        {"env.penalty_mode", "per_event"},

        {"agent.alpha", "0.005"},
        {"agent.gamma", "0.999"},
        {"agent.seed", "0"},
        {"agent.epsilon_rule", "explore_below"},
        {"agent.q_init_min", "-130"},
        {"agent.q_init_max", "-130"},

        {"train.episodes", "1000"},
        {"train.epsilon_start", "1"},
        {"train.epsilon_end", "0.001"},
    };
    return table;
}

bool is_path_key(const std::string& key) {
    return key == "run.cycle" || key == "fc.dcdc_eff_table" || key == "battery.table";
}

}  // namespace

RunConfig::RunConfig() {
    for (const auto& [key, value] : defaults()) values_[key] = value;
    if (const char* seed = std::getenv("FQL_EMS_SEED"); seed && *seed) {
        set("agent.seed", seed);
        integer("agent.seed");
    }
}

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& kv : defaults()) out.push_back(kv.first);
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second = value;
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    const auto base = std::filesystem::path(path).parent_path();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string text = detail::trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(text.substr(0, eq));
        std::string value = detail::trim(text.substr(eq + 1));
        if (is_path_key(key) && !value.empty() && std::filesystem::path(value).is_relative()) {
            value = (base / value).lexically_normal().string();
        }
        try {
            set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second;
}

double RunConfig::number(const std::string& key) const {
    const std::string& text = get(key);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    return value;
}

long long RunConfig::integer(const std::string& key) const {
    const std::string& text = get(key);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return value;
}

bool RunConfig::flag(const std::string& key) const {
    const std::string& text = get(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": expected true|false, got '" + text + "'");
}

std::string RunConfig::dump() const {
    std::ostringstream out;
    for (const auto& kv : defaults()) out << kv.first << " = " << values_.at(kv.first) << '\n';
    return out.str();
}

VehicleParams RunConfig::vehicle() const {
    VehicleParams p;
    p.mass_kg = number("vehicle.mass_kg");
    p.frontal_area_m2 = number("vehicle.frontal_area_m2");
    p.air_density = number("vehicle.air_density");
    p.drag_coeff = number("vehicle.drag_coeff");
    p.rolling_coeff = number("vehicle.rolling_coeff");
    p.driveline_eff = number("vehicle.driveline_eff");
    p.gravity = number("vehicle.gravity");
    p.slope_rad = number("vehicle.slope_rad");
    p.validate();
    return p;
}

PowerClamp RunConfig::power_clamp() const {
    PowerClamp c{number("cycle.p_min_w"), number("cycle.p_max_w")};
    if (!(c.min_w < c.max_w)) throw ConfigError("cycle power clamp must satisfy min < max");
    return c;
}

FuelCellParams RunConfig::fuel_cell() const {
    FuelCellParams p;
    p.n_cell = number("fc.n_cell");
    p.area_cm2 = number("fc.area_cm2");
    p.e0_v = number("fc.e0_v");
    p.gas_const = number("fc.gas_const");
    p.temperature_k = number("fc.temperature_k");
    p.n_electrons = number("fc.n_electrons");
    p.faraday = number("fc.faraday");
    p.transfer_coeff = number("fc.transfer_coeff");
    p.i_loss = number("fc.i_loss");
    p.i0 = number("fc.i0");
    p.i_lim = number("fc.i_lim");
    p.r_ohm = number("fc.r_ohm");
    p.nernst_offset_v = number("fc.nernst_offset_v");
    p.molar_mass_h2 = number("fc.molar_mass_h2");
    p.hhv_volt_equiv = number("fc.hhv_volt_equiv");
    if (const auto& table = get("fc.dcdc_eff_table"); !table.empty()) {
        const auto csv = detail::read_numeric_csv(table, {"p_w", "eff"});
        std::vector<double> xs, ys;
        for (const auto& row : csv.rows) {
            xs.push_back(row[0]);
            ys.push_back(row[1]);
        }
        p.dcdc_eff = LookupTable(xs, ys);
    } else {
        p.dcdc_eff = LookupTable::constant(number("fc.dcdc_eff"));
    }
    p.aux_current_a = number("fc.aux_current_a");
    p.bus_voltage_v = number("fc.bus_voltage_v");
    p.p_max_w = number("fc.p_max_w");
    p.validate();
    return p;
}

BatteryParams RunConfig::battery() const {
    BatteryParams p;
    p.capacity_as = number("battery.capacity_as");
    p.dcdc_eff = number("battery.dcdc_eff");
    p.nominal_voltage_v = number("battery.nominal_voltage_v");
    if (const auto& table = get("battery.table"); !table.empty()) p = load_battery_table(table, p);
    p.validate();
    return p;
}

PolarizationAnchors RunConfig::anchors() const {
    PolarizationAnchors a;
    a.max_power_w = number("calibration.max_power_w");
    a.max_power_current_a = number("calibration.max_power_current_a");
    a.efficiency_current_a = number("calibration.efficiency_current_a");
    a.efficiency = number("calibration.efficiency");
    if (!(a.max_power_w > 0 && a.max_power_current_a > 0 && a.efficiency_current_a > 0 && a.efficiency > 0)) {
        throw ConfigError("calibration anchors must be positive");
    }
    return a;
}

CalibrationOptions RunConfig::calibration_options() const {
    CalibrationOptions o;
    o.free_cell_count = flag("calibration.free_cell_count");
    o.max_residual = number("calibration.max_residual");
    return o;
}

HydrogenMode RunConfig::hydrogen_mode() const { return parse_hydrogen_mode(get("env.hydrogen_mode")); }

EnvConfig RunConfig::env() const {
    EnvConfig c;
    c.soc_ref = number("env.soc_ref");
    c.soc_penalty_weight = number("env.soc_penalty_weight");
    c.start_penalty_weight = number("env.start_penalty_weight");
    c.start_threshold_w = number("env.start_threshold_w");
    c.soc_min = number("env.soc_min");
    c.soc_max = number("env.soc_max");
    c.initial_soc = number("env.initial_soc");
    c.penalty_mode = parse_penalty_mode(get("env.penalty_mode"));
    c.validate();
    return c;
}

AgentConfig RunConfig::agent() const {
    AgentConfig c;
    c.alpha = number("agent.alpha");
    c.gamma = number("agent.gamma");
    const long long seed = integer("agent.seed");
    if (seed < 0) throw ConfigError("agent.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    const auto& rule = get("agent.epsilon_rule");
    if (rule == "explore_below") {
        c.epsilon_rule = EpsilonRule::explore_below;
    } else if (rule == "paper_literal") {
        c.epsilon_rule = EpsilonRule::paper_literal;
    } else {
        throw ConfigError("agent.epsilon_rule: expected explore_below|paper_literal");
    }
    c.q_init_min = number("agent.q_init_min");
    c.q_init_max = number("agent.q_init_max");
    c.validate();
    return c;
}

TrainConfig RunConfig::train() const {
    TrainConfig c;
    const long long episodes = integer("train.episodes");
    if (episodes < 1 || episodes > 100000000) throw ConfigError("train.episodes out of range");
    c.episodes = static_cast<int>(episodes);
    c.epsilon_start = number("train.epsilon_start");
    c.epsilon_end = number("train.epsilon_end");
    c.agent = agent();
    c.env = env();
    c.validate();
    return c;
}

VelocityUnit RunConfig::cycle_units() const { return parse_velocity_unit(get("cycle.units")); }

PowertrainModel RunConfig::build_model(CalibrationReport* report) const {
    FuelCellParams fc = fuel_cell();
    if (flag("calibration.enabled")) {
        CalibrationReport r = calibrate_polarization(fc, anchors(), calibration_options());
        fc = r.params;
        if (report) *report = std::move(r);
    }
    return PowertrainModel::make(vehicle(), fc, battery(), hydrogen_mode());
}

DriveCycle RunConfig::load_drive_cycle(const std::string& path) const {
    const std::string& source = path.empty() ? get("run.cycle") : path;
    if (source.empty()) throw ConfigError("no drive cycle given (run.cycle / --cycle)");
    if (!std::filesystem::exists(source)) throw ConfigError("drive cycle file not found: " + source);
    return derive_power(load_cycle(source, cycle_units()), vehicle(), power_clamp());
}

}  // namespace fqlems
