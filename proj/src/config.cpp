#include "aoiris/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aoiris {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config: " + key + " " + why);
}

double parse_number(const std::string& key, const std::string& text, std::string* unit_out) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str()) bad_key(key, "expects a number, got '" + t + "'");
    if (unit_out != nullptr) *unit_out = trim(std::string(end));
    return v;
}

double to_watts(const std::string& key, const std::string& text) {
    std::string unit;
    const double v = parse_number(key, text, &unit);
    if (unit.empty() || unit == "W") return v;
    if (unit == "mW") return v * 1e-3;
    if (unit == "dBm") return std::pow(10.0, (v - 30.0) / 10.0);
    if (unit == "dBW") return std::pow(10.0, v / 10.0);
    bad_key(key, "has unknown power unit '" + unit + "'");
}

double to_linear_gain(const std::string& key, const std::string& text) {
    std::string unit;
    const double v = parse_number(key, text, &unit);
    if (unit.empty()) return v;
    if (unit == "dB") return std::pow(10.0, v / 10.0);
    bad_key(key, "has unknown gain unit '" + unit + "'");
}

double to_meters(const std::string& key, const std::string& text) {
    std::string unit;
    const double v = parse_number(key, text, &unit);
    if (unit.empty() || unit == "m") return v;
    bad_key(key, "has unknown distance unit '" + unit + "'");
}

double to_plain(const std::string& key, const std::string& text) {
    std::string unit;
    const double v = parse_number(key, text, &unit);
    if (!unit.empty()) bad_key(key, "takes a bare number, got unit '" + unit + "'");
    return v;
}

long long to_int(const std::string& key, const std::string& text) {
    const double v = to_plain(key, text);
    const auto r = static_cast<long long>(std::llround(v));
    if (std::abs(v - static_cast<double>(r)) > 1e-9) bad_key(key, "expects an integer");
    return r;
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "1" || t == "true" || t == "on") return true;
    if (t == "0" || t == "false" || t == "off") return false;
    bad_key(key, "expects a boolean");
}

// One assignment into the config; returns false for unknown keys.
bool apply_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    auto& pl = cfg.pathloss;
    if (key == "n_tx") cfg.sizes.n_tx = static_cast<int>(to_int(key, value));
    else if (key == "n_ris") cfg.sizes.n_ris = static_cast<int>(to_int(key, value));
    else if (key == "n_iu") cfg.sizes.n_iu = static_cast<int>(to_int(key, value));
    else if (key == "n_eu") cfg.sizes.n_eu = static_cast<int>(to_int(key, value));
    else if (key == "max_scheduled") cfg.max_scheduled = static_cast<int>(to_int(key, value));
    else if (key == "arrival_prob") {
        cfg.lambdas.clear();
        for (const auto& part : split(value, ',')) cfg.lambdas.push_back(to_plain(key, part));
    } else if (key == "noise_power") cfg.noise_power = to_watts(key, value);
    else if (key == "snr_threshold") cfg.gamma_th = to_linear_gain(key, value);
    else if (key == "harvest_min") cfg.harvest_min = to_watts(key, value);
    else if (key == "power_budget") cfg.power_budget = to_watts(key, value);
    else if (key == "ref_gain") pl.a0 = to_linear_gain(key, value);
    else if (key == "ref_distance") pl.d0 = to_meters(key, value);
    else if (key == "exp_ap_iu") pl.exp_ap_iu = to_plain(key, value);
    else if (key == "exp_ris_iu") pl.exp_ris_iu = to_plain(key, value);
    else if (key == "exp_ap_eu") pl.exp_ap_eu = to_plain(key, value);
    else if (key == "exp_ris_eu") pl.exp_ris_eu = to_plain(key, value);
    else if (key == "exp_ap_ris") pl.exp_ap_ris = to_plain(key, value);
    else if (key == "d_ap_iu") pl.d_ap_iu = to_meters(key, value);
    else if (key == "d_ap_eu") pl.d_ap_eu = to_meters(key, value);
    else if (key == "d_ap_ris") pl.d_ap_ris = to_meters(key, value);
    else if (key == "d_ris_iu") pl.d_ris_iu = to_meters(key, value);
    else if (key == "d_ris_eu") pl.d_ris_eu = to_meters(key, value);
    else if (key == "min_ris_user_distance") pl.min_ris_user_distance = to_meters(key, value);
    else if (key == "slots") cfg.slots = static_cast<int>(to_int(key, value));
    else if (key == "reps") cfg.reps = static_cast<int>(to_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "policy") cfg.policy = baseline_from_string(trim(value));
    else if (key == "record_traces") cfg.record_traces = to_bool(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(to_int(key, value));
    else if (key == "penalty_c0_scale") cfg.sca.penalty_c0_scale = to_plain(key, value);
    else if (key == "penalty_growth") cfg.sca.penalty_growth = to_plain(key, value);
    else if (key == "penalty_rounds") cfg.sca.penalty_rounds = static_cast<int>(to_int(key, value));
    else if (key == "eps_phase") cfg.sca.eps_phase = to_plain(key, value);
    else if (key == "eps_beam") cfg.sca.eps_beam = to_plain(key, value);
    else if (key == "eps_ao") cfg.sca.eps_ao = to_plain(key, value);
    else if (key == "max_phase_iters") cfg.sca.max_phase_iters = static_cast<int>(to_int(key, value));
    else if (key == "max_beam_iters") cfg.sca.max_beam_iters = static_cast<int>(to_int(key, value));
    else if (key == "max_ao_rounds") cfg.sca.max_ao_rounds = static_cast<int>(to_int(key, value));
    else if (key == "unit_modulus_tol") cfg.sca.unit_modulus_tol = to_plain(key, value);
    else if (key == "solver_tol_feas") cfg.sca.solver.tol_feas = to_plain(key, value);
    else if (key == "solver_tol_gap") cfg.sca.solver.tol_gap = to_plain(key, value);
    else if (key == "solver_max_iters") cfg.sca.solver.max_iters = static_cast<int>(to_int(key, value));
    else if (key == "af_antennas") cfg.af.n_antennas = static_cast<int>(to_int(key, value));
    else if (key == "af_power_share") cfg.af.relay_power_share = to_plain(key, value);
    else return false;
    return true;
}

struct ParsedFile {
    std::vector<std::pair<std::string, std::string>> entries;
};

ParsedFile parse_lines(const std::string& text) {
    ParsedFile out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value': '" + line + "'");
        }
        out.entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    for (const auto& [key, value] : parse_lines(text).entries) {
        if (!apply_key(cfg, key, value)) {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "n_tx = " << cfg.sizes.n_tx << "\n";
    os << "n_ris = " << cfg.sizes.n_ris << "\n";
    os << "n_iu = " << cfg.sizes.n_iu << "\n";
    os << "n_eu = " << cfg.sizes.n_eu << "\n";
    os << "max_scheduled = " << cfg.max_scheduled << "\n";
    if (!cfg.lambdas.empty()) {
        os << "arrival_prob = ";
        for (size_t i = 0; i < cfg.lambdas.size(); ++i) {
            os << (i ? ", " : "") << format_double(cfg.lambdas[i]);
        }
        os << "\n";
    }
    os << "noise_power = " << format_double(cfg.noise_power) << "\n";
    os << "snr_threshold = " << format_double(cfg.gamma_th) << "\n";
    os << "harvest_min = " << format_double(cfg.harvest_min) << "\n";
    os << "power_budget = " << format_double(cfg.power_budget) << "\n";
    os << "ref_gain = " << format_double(cfg.pathloss.a0) << "\n";
    os << "ref_distance = " << format_double(cfg.pathloss.d0) << "\n";
    os << "exp_ap_iu = " << format_double(cfg.pathloss.exp_ap_iu) << "\n";
    os << "exp_ris_iu = " << format_double(cfg.pathloss.exp_ris_iu) << "\n";
    os << "exp_ap_eu = " << format_double(cfg.pathloss.exp_ap_eu) << "\n";
    os << "exp_ris_eu = " << format_double(cfg.pathloss.exp_ris_eu) << "\n";
    os << "exp_ap_ris = " << format_double(cfg.pathloss.exp_ap_ris) << "\n";
    os << "d_ap_iu = " << format_double(cfg.pathloss.d_ap_iu) << "\n";
    os << "d_ap_eu = " << format_double(cfg.pathloss.d_ap_eu) << "\n";
    os << "d_ap_ris = " << format_double(cfg.pathloss.d_ap_ris) << "\n";
    if (cfg.pathloss.d_ris_iu > 0.0) os << "d_ris_iu = " << format_double(cfg.pathloss.d_ris_iu) << "\n";
    if (cfg.pathloss.d_ris_eu > 0.0) os << "d_ris_eu = " << format_double(cfg.pathloss.d_ris_eu) << "\n";
    os << "min_ris_user_distance = " << format_double(cfg.pathloss.min_ris_user_distance) << "\n";
    os << "slots = " << cfg.slots << "\n";
    os << "reps = " << cfg.reps << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "policy = " << to_string(cfg.policy) << "\n";
    os << "record_traces = " << (cfg.record_traces ? 1 : 0) << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "penalty_c0_scale = " << format_double(cfg.sca.penalty_c0_scale) << "\n";
    os << "penalty_growth = " << format_double(cfg.sca.penalty_growth) << "\n";
    os << "penalty_rounds = " << cfg.sca.penalty_rounds << "\n";
    os << "eps_phase = " << format_double(cfg.sca.eps_phase) << "\n";
    os << "eps_beam = " << format_double(cfg.sca.eps_beam) << "\n";
    os << "eps_ao = " << format_double(cfg.sca.eps_ao) << "\n";
    os << "max_phase_iters = " << cfg.sca.max_phase_iters << "\n";
    os << "max_beam_iters = " << cfg.sca.max_beam_iters << "\n";
    os << "max_ao_rounds = " << cfg.sca.max_ao_rounds << "\n";
    os << "unit_modulus_tol = " << format_double(cfg.sca.unit_modulus_tol) << "\n";
    os << "solver_tol_feas = " << format_double(cfg.sca.solver.tol_feas) << "\n";
    os << "solver_tol_gap = " << format_double(cfg.sca.solver.tol_gap) << "\n";
    os << "solver_max_iters = " << cfg.sca.solver.max_iters << "\n";
    os << "af_antennas = " << cfg.af.n_antennas << "\n";
    os << "af_power_share = " << format_double(cfg.af.relay_power_share) << "\n";
    return os.str();
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& param,
                                 double value) {
    ScenarioConfig out = base;
    if (param == "snr_threshold") out.gamma_th = value;
    else if (param == "power_budget") out.power_budget = value;
    else if (param == "harvest_min") out.harvest_min = value;
    else if (param == "d_ap_ris") out.pathloss.d_ap_ris = value;
    else if (param == "n_ris") out.sizes.n_ris = static_cast<int>(std::llround(value));
    else throw std::invalid_argument("sweep: unknown sweep_param '" + param + "'");
    return out;
}

SweepSpec parse_sweep_spec(const std::string& text) {
    SweepSpec spec;
    std::vector<std::string> value_tokens;
    std::vector<std::pair<std::string, std::string>> base_entries;
    for (const auto& [key, value] : parse_lines(text).entries) {
        if (key == "sweep_param") {
            spec.param = trim(value);
        } else if (key == "sweep_values") {
            value_tokens = split(value, ',');
        } else if (key == "policies") {
            for (const auto& p : split(value, ',')) spec.policies.push_back(baseline_from_string(p));
        } else {
            base_entries.emplace_back(key, value);
        }
    }
    if (spec.param.empty()) throw std::invalid_argument("sweep: missing sweep_param");
    if (value_tokens.empty()) throw std::invalid_argument("sweep: missing sweep_values");
    if (spec.policies.empty()) spec.policies.push_back(BaselineKind::proposed);

    ScenarioConfig base;
    for (const auto& [key, value] : base_entries) {
        if (!apply_key(base, key, value)) {
            throw std::invalid_argument("sweep: unknown key '" + key + "'");
        }
    }
    for (const auto& tok : value_tokens) {
        double v;
        if (spec.param == "snr_threshold") v = to_linear_gain(spec.param, tok);
        else if (spec.param == "power_budget" || spec.param == "harvest_min") v = to_watts(spec.param, tok);
        else if (spec.param == "d_ap_ris") v = to_meters(spec.param, tok);
        else if (spec.param == "n_ris") v = static_cast<double>(to_int(spec.param, tok));
        else throw std::invalid_argument("sweep: unknown sweep_param '" + spec.param + "'");
        spec.values.push_back(v);
    }
    // base validity is checked per sweep point, where the value is in place
    spec.base = base;
    apply_sweep_value(base, spec.param, spec.values.front()).validate();
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) { return parse_sweep_spec(read_file(path)); }

std::string format_significant(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0.00000";
    const double mag = std::floor(std::log10(std::abs(v))) + 1.0;
    const int decimals = std::max(0, digits - static_cast<int>(mag));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string render_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    os << "policy,swept_param,value,mean_sum_aoi,time_avg_sum_aoi,delivery_rate,"
          "mean_harvest_dbm,infeasible_slots,seed\n";
    for (const auto& row : rows) {
        const double harvest_dbm =
            row.metrics.mean_harvest_w > 0.0
                ? 10.0 * std::log10(row.metrics.mean_harvest_w * 1e3)
                : -kInf;
        os << row.policy_label << ',' << row.swept_param << ','
           << format_significant(row.swept_value) << ','
           << format_significant(row.metrics.mean_sum_aoi) << ','
           << format_significant(row.metrics.time_avg_sum_aoi) << ','
           << format_significant(row.metrics.delivery_rate) << ','
           << format_significant(harvest_dbm) << ','
           << row.metrics.infeasible_slots << ','
           << row.metrics.config.seed << "\n";
    }
    return os.str();
}

std::string run_sweep(const SweepSpec& spec, const std::string& out_path) {
    std::vector<CompareItem> items;
    for (const auto kind : spec.policies) {
        for (const double v : spec.values) {
            CompareItem item;
            item.policy_label = to_string(kind);
            item.swept_param = spec.param;
            item.swept_value = v;
            item.config = apply_sweep_value(spec.base, spec.param, v);
            item.config.policy = kind;
            item.config.record_traces = false;
            items.push_back(std::move(item));
        }
    }
    const auto rows = compare(items);
    const std::string csv = render_csv(rows);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("sweep: cannot write '" + out_path + "'");
        out << csv;
        if (!out) throw std::runtime_error("sweep: write failed for '" + out_path + "'");
    }
    return csv;
}

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("AOIRIS_LOG");
        if (env == nullptr) return LogLevel::info;
        const std::string v(env);
        if (v == "quiet" || v == "0") return LogLevel::quiet;
        if (v == "debug" || v == "2") return LogLevel::debug;
        return LogLevel::info;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::fprintf(stderr, "[aoiris] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::fprintf(stderr, "[aoiris] %s\n", msg.c_str());
}

}  // namespace aoiris
