#pragma once

#include "aoiris/sim.hpp"

#include <string>
#include <vector>

namespace aoiris {

// Key-value config files: one "key = value" per line, '#' comments. Physical
// quantities take an explicit unit suffix (dB, dBm, W, mW, m); bare numbers
// are linear/SI. Unknown keys and out-of-range values raise invalid_argument
// naming the key. Omitted keys keep their defaults.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text);

/// Canonical serialization (SI units); load(serialize(cfg)) round-trips.
std::string serialize_config(const ScenarioConfig& cfg);

struct SweepSpec {
    std::string param;           // snr_threshold | power_budget | n_ris | harvest_min | d_ap_ris
    std::vector<double> values;  // converted to linear/SI
    std::vector<BaselineKind> policies;
    ScenarioConfig base;
};

/// Sweep file: sweep_param, sweep_values, policies, plus base config keys.
SweepSpec load_sweep_spec(const std::string& path);
SweepSpec parse_sweep_spec(const std::string& text);

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& param,
                                 double value);

/// Fixed-point decimal with the given significant digits (no exponents).
std::string format_significant(double v, int digits = 6);

std::string render_csv(const std::vector<CompareRow>& rows);

/// Runs every (policy x value) combination and writes the CSV; returns it too.
std::string run_sweep(const SweepSpec& spec, const std::string& out_path);

// Minimal stderr logger; AOIRIS_LOG selects quiet|info|debug (default info).
enum class LogLevel { quiet = 0, info = 1, debug = 2 };
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace aoiris
