#include "critwave/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace critwave {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Entry {
    enum class Kind { real, integer, boolean, text, real_list } kind;
    std::function<void(RunConfig&, const std::string&, int)> set;
    std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(line, "expected a real number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in integer '" + v + "'");
        return static_cast<int>(x);
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(line, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(line, "expected a boolean, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, "empty element in list");
        out.push_back(parse_real(item, line));
    }
    if (out.empty()) fail(line, "empty list");
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += fmt(xs[i]);
    }
    return out;
}

#define REAL_KEY(key, field, lo_ok, hi_ok, range_msg)                                      \
    {key,                                                                                  \
     Entry{Entry::Kind::real,                                                              \
           [](RunConfig& c, const std::string& v, int line) {                              \
               const double x = parse_real(v, line);                                       \
               if (!((lo_ok) && (hi_ok))) fail(line, std::string(key) + " " + range_msg);  \
               c.field = x;                                                                \
           },                                                                              \
           [](const RunConfig& c) { return fmt(c.field); }}}

#define INT_KEY(key, field, cond, range_msg)                                              \
    {key,                                                                                 \
     Entry{Entry::Kind::integer,                                                          \
           [](RunConfig& c, const std::string& v, int line) {                             \
               const int x = parse_int(v, line);                                          \
               if (!(cond)) fail(line, std::string(key) + " " + range_msg);               \
               c.field = x;                                                               \
           },                                                                             \
           [](const RunConfig& c) { return std::to_string(c.field); }}}

#define BOOL_KEY(key, field)                                                              \
    {key, Entry{Entry::Kind::boolean,                                                     \
                [](RunConfig& c, const std::string& v, int line) { c.field = parse_bool(v, line); }, \
                [](const RunConfig& c) { return c.field ? "true" : "false"; }}}

#define LIST_KEY(key, field)                                                              \
    {key, Entry{Entry::Kind::real_list,                                                   \
                [](RunConfig& c, const std::string& v, int line) { c.field = parse_list(v, line); }, \
                [](const RunConfig& c) { return fmt_list(c.field); }}}

const std::map<std::string, Entry>& schema() {
    static const std::map<std::string, Entry> s = {
        INT_KEY("grid.n_points", grid_n_points, x >= 16, "must be >= 16"),
        REAL_KEY("grid.dr", grid_dr, x > 0.0, x < 1.0, "out of (0,1)"),
        REAL_KEY("spectrum.dr", spectrum_dr, x > 0.0, x <= 0.05, "out of (0,0.05]"),
        REAL_KEY("spectrum.r_max", spectrum_r_max, x >= 10.0, x <= 500.0, "out of [10,500]"),
        REAL_KEY("solver.cfl", solver_cfl, x > 0.0, x <= 1.0, "out of (0,1]"),
        REAL_KEY("solver.t_max", solver_t_max, x > 0.0, x <= 1e5, "out of (0,1e5]"),
        REAL_KEY("solver.blowup_sup_threshold", solver_blowup_sup_threshold, x > 1.0, true,
                 "must exceed 1"),
        REAL_KEY("solver.decay_local_energy_threshold", solver_decay_local_energy_threshold,
                 x > 0.0, x < 1.0, "out of (0,1)"),
        REAL_KEY("solver.decay_sup_threshold", solver_decay_sup_threshold, x > 0.0, x < 1.0,
                 "out of (0,1)"),
        REAL_KEY("solver.dwell_time", solver_dwell_time, x >= 0.0, true, "must be >= 0"),
        REAL_KEY("solver.causal_margin", solver_causal_margin, x >= 0.0, true, "must be >= 0"),
        INT_KEY("solver.record_stride", solver_record_stride, x >= 1, "must be >= 1"),
        BOOL_KEY("solver.store_snapshots", solver_store_snapshots),
        BOOL_KEY("solver.drop_nonlinearity", solver_drop_nonlinearity),
        REAL_KEY("family.support_radius", family_support_radius, x > 1.0, true, "must exceed 1"),
        REAL_KEY("family.norm_target", family_norm_target, x >= 0.0, true, "must be >= 0"),
        REAL_KEY("family.f1_amplitude", family_f1_amplitude, true, true, ""),
        REAL_KEY("family.f1_center", family_f1_center, x >= 0.0, true, "must be >= 0"),
        REAL_KEY("family.f1_width", family_f1_width, x > 0.0, true, "must be positive"),
        REAL_KEY("family.f2_amplitude", family_f2_amplitude, true, true, ""),
        REAL_KEY("family.f2_center", family_f2_center, x >= 0.0, true, "must be >= 0"),
        REAL_KEY("family.f2_width", family_f2_width, x > 0.0, true, "must be positive"),
        REAL_KEY("evolve.delta0", evolve_delta0, true, true, ""),
        REAL_KEY("threshold.c_lo", threshold_c_lo, true, true, ""),
        REAL_KEY("threshold.c_hi", threshold_c_hi, true, true, ""),
        REAL_KEY("threshold.tol", threshold_tol, x > 0.0, x < 1.0, "out of (0,1)"),
        BOOL_KEY("threshold.auto_bracket", threshold_auto_bracket),
        LIST_KEY("ejection.c_offsets", ejection_c_offsets),
        REAL_KEY("ejection.epsilon0", ejection_epsilon0, x > 0.0, x <= 0.5, "out of (0,0.5]"),
        REAL_KEY("ejection.floor_guard", ejection_floor_guard, x >= 1.0, true, "must be >= 1"),
        REAL_KEY("ejection.threshold_tol", ejection_threshold_tol, x > 0.0, x < 1.0, "out of (0,1)"),
        REAL_KEY("bootstrap.c_offset", bootstrap_c_offset, x != 0.0, true, "must be nonzero"),
        REAL_KEY("bootstrap.rho_tol", bootstrap_rho_tol, x > 0.0, true, "must be positive"),
        REAL_KEY("bootstrap.n_ratio_tol", bootstrap_n_ratio_tol, x > 0.0, true, "must be positive"),
        REAL_KEY("bootstrap.threshold_tol", bootstrap_threshold_tol, x > 0.0, x < 1.0, "out of (0,1)"),
        LIST_KEY("hscaling.epsilons", hscaling_epsilons),
        REAL_KEY("hscaling.tol", hscaling_tol, x > 0.0, x < 1.0, "out of (0,1)"),
        REAL_KEY("hscaling.lipschitz_perturbation", hscaling_lipschitz_perturbation, x >= 0.0,
                 x < 1.0, "out of [0,1)"),
        REAL_KEY("dispersive.threshold_tol", dispersive_threshold_tol, x > 0.0, x < 1.0,
                 "out of (0,1)"),
        REAL_KEY("dispersive.linear_t_max", dispersive_linear_t_max, x > 10.0, true,
                 "must exceed 10"),
        REAL_KEY("dispersive.linear_r_max", dispersive_linear_r_max, x > 20.0, true,
                 "must exceed 20"),
        {"output.dir",
         Entry{Entry::Kind::text,
               [](RunConfig& c, const std::string& v, int line) {
                   if (v.empty()) fail(line, "output.dir must not be empty");
                   c.output_dir = v;
               },
               [](const RunConfig& c) { return c.output_dir; }}},
    };
    return s;
}

#undef REAL_KEY
#undef INT_KEY
#undef BOOL_KEY
#undef LIST_KEY

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header '" + raw + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value', got '" + raw + "'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
        const auto it = schema().find(key);
        if (it == schema().end()) fail(line_no, "unknown key '" + key + "'");
        it->second.set(cfg, value, line_no);
    }
    // cross-field checks
    if (cfg.threshold_c_lo >= cfg.threshold_c_hi)
        throw ConfigError("config: threshold.c_lo must be below threshold.c_hi");
    if (cfg.family_support_radius >= (cfg.grid_n_points - 1) * cfg.grid_dr)
        throw ConfigError("config: family.support_radius exceeds the grid");
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    std::string current;
    for (const auto& [key, entry] : schema()) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        if (section != current) {
            if (!out.empty()) out += "\n";
            out += "[" + section + "]\n";
            current = section;
        }
        out += key.substr(dot + 1) + " = " + entry.get(cfg) + "\n";
    }
    return out;
}

}  // namespace critwave
