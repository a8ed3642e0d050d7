#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zlab/diagnostics.hpp"
#include "zlab/dynamics.hpp"
#include "zlab/state.hpp"

namespace zlab {

struct RunConfig {
    struct Grid {
        int m = 128;
        double length = 16.0;
        bool operator==(const Grid&) const = default;
    } grid;

    struct Physics {
        double s = 0.95;
        bool coupling = true;
        std::string u_kind = "gaussian";  // zero | gaussian | townes_scaled | file
        double u_amplitude = 1.0;
        double u_sigma = 1.7;
        double mu = 1.0;
        double mass_ratio = 1.0;
        double mass_factor = 0.0;
        std::string u_file;
        std::string n_kind = "minus_u_sq";  // zero | gaussian | minus_u_sq | file
        double n_amplitude = 1.0;
        double n_sigma = 1.0;
        std::string n_file;
        std::string w_kind = "zero";  // zero | gaussian | file
        double w_amplitude = 1.0;
        double w_sigma = 1.0;
        std::string w_file;
        bool radial_required = true;
        bool operator==(const Physics&) const = default;
    } physics;

    struct Schedule {
        double eps = 1e-3;
        double n_min = 4.0;
        double n_max = 0.0;   // 0 = the grid's resolved third
        double fixed_n = 0.0; // > 0 freezes the smoothing frequency
        bool operator==(const Schedule&) const = default;
    } schedule;

    struct Stepping {
        double dt_base = 1e-3;
        double dt_min = 1e-5;
        double c_local = 1.0;
        double tail_fraction_max = 0.05;
        double growth_factor = 10.0;
        double t_end = 1.0;
        bool adaptive = true;
        long long max_steps = 2'000'000;
        bool operator==(const Stepping&) const = default;
    } stepping;

    struct Diagnostics {
        int record_stride = 1;
        bool energies_in_records = true;
        long long checkpoint_stride = 0;
        std::vector<double> radii{2.0, 1.0, 0.5, 0.35};
        std::string probe = "bilinear";  // bilinear | strichartz_schrodinger | strichartz_wave
        double probe_q = 4.0;            // "inf" accepted
        double probe_r = 4.0;
        int probe_trials = 8;
        double probe_window = 1.0;
        int probe_nt = 33;
        double probe_delta = 0.015;
        double probe_n2 = 48.0;
        std::vector<double> probe_n1_ladder{3.0, 6.0, 12.0, 24.0};
        std::vector<double> sweep_n_ladder{8.0, 16.0, 32.0, 64.0};
        double drift_band_lo = 12.0;
        double drift_band_hi = 110.0;
        double drift_power = -1.5;
        double drift_l2 = 1.5;
        double drift_delta = 2e-4;
        double drift_dt = 1e-5;
        bool operator==(const Diagnostics&) const = default;
    } diagnostics;

    std::uint64_t seed = 1;
    std::string out_dir = "out";

    bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid configuration:";
        for (const auto& line : v) {
            s += "\n  - ";
            s += line;
        }
        return s;
    }
    std::vector<std::string> violations_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline bool parse_double_value(const std::string& v, double& out) {
    if (v == "inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    char* end = nullptr;
    out = std::strtod(v.c_str(), &end);
    return end && *end == '\0' && !v.empty();
}

inline bool parse_int_value(const std::string& v, long long& out) {
    char* end = nullptr;
    out = std::strtoll(v.c_str(), &end, 10);
    return end && *end == '\0' && !v.empty();
}

inline bool parse_bool_value(const std::string& v, bool& out) {
    if (v == "on" || v == "true" || v == "1") {
        out = true;
        return true;
    }
    if (v == "off" || v == "false" || v == "0") {
        out = false;
        return true;
    }
    return false;
}

inline bool parse_list_value(const std::string& v, std::vector<double>& out) {
    out.clear();
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        double x;
        if (!parse_double_value(trim(item), x)) return false;
        out.push_back(x);
    }
    return !out.empty();
}

inline std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_list(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += format_double(xs[i]);
    }
    return s;
}

}  // namespace detail

// every constraint violation is collected, not just the first
inline std::vector<std::string> validate_config(const RunConfig& c) {
    std::vector<std::string> bad;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };

    need(c.grid.m >= 4, "[grid] m must be at least 4");
    need(c.grid.length > 0.0, "[grid] length must be positive");

    need(c.physics.s > 0.0 && c.physics.s < 1.0, "[physics] s must lie in (0, 1)");
    const bool u_g = c.physics.u_kind == "gaussian";
    const bool u_t = c.physics.u_kind == "townes_scaled";
    need(u_g || u_t || c.physics.u_kind == "zero" || c.physics.u_kind == "file",
         "[physics] u_kind must be zero, gaussian, townes_scaled, or file");
    if (u_g) need(c.physics.u_sigma > 0.0, "[physics] u_sigma must be positive");
    if (u_t) {
        need(c.physics.mu > 0.0, "[physics] mu must be positive");
        need(c.physics.mass_ratio > 0.0, "[physics] mass_ratio must be positive");
    }
    if (c.physics.u_kind == "file")
        need(!c.physics.u_file.empty(), "[physics] u_kind=file needs u_file");
    need(c.physics.mass_factor >= 0.0, "[physics] mass_factor must be nonnegative");
    const bool n_g = c.physics.n_kind == "gaussian";
    need(n_g || c.physics.n_kind == "zero" || c.physics.n_kind == "minus_u_sq" ||
             c.physics.n_kind == "file",
         "[physics] n_kind must be zero, gaussian, minus_u_sq, or file");
    if (n_g) need(c.physics.n_sigma > 0.0, "[physics] n_sigma must be positive");
    if (c.physics.n_kind == "file")
        need(!c.physics.n_file.empty(), "[physics] n_kind=file needs n_file");
    const bool w_g = c.physics.w_kind == "gaussian";
    need(w_g || c.physics.w_kind == "zero" || c.physics.w_kind == "file",
         "[physics] w_kind must be zero, gaussian, or file");
    if (w_g) need(c.physics.w_sigma > 0.0, "[physics] w_sigma must be positive");
    if (c.physics.w_kind == "file")
        need(!c.physics.w_file.empty(), "[physics] w_kind=file needs w_file");

    need(c.schedule.eps > 0.0 && c.schedule.eps <= 0.05,
         "[schedule] eps must lie in (0, 0.05]");
    need(c.schedule.n_min > 0.0, "[schedule] n_min must be positive");
    need(c.schedule.n_max >= 0.0, "[schedule] n_max must be nonnegative (0 = automatic)");
    need(c.schedule.fixed_n >= 0.0, "[schedule] fixed_n must be nonnegative (0 = scheduled)");
    if (c.schedule.fixed_n <= 0.0 && c.physics.s > 0.0 && c.physics.s < 1.0) {
        // the frequency schedule is only meaningful in the regime s > 16/17
        if (!(c.physics.s > 16.0 / 17.0)) {
            bad.push_back(
                "[schedule] the smoothing-frequency schedule requires s > 16/17; "
                "set fixed_n > 0 to run at lower regularity");
        } else {
            const EpsilonRange er = epsilon_range_valid(c.physics.s, c.schedule.eps);
            if (!er.ok())
                bad.push_back(
                    "[schedule] eps is outside the admissible range (17s-16)/(69-68s) "
                    "for the chosen s");
        }
    }

    need(c.stepping.dt_base > c.stepping.dt_min && c.stepping.dt_min > 0.0,
         "[stepping] need dt_base > dt_min > 0");
    need(c.stepping.c_local > 0.0, "[stepping] c_local must be positive");
    need(c.stepping.tail_fraction_max > 0.0 && c.stepping.tail_fraction_max < 1.0,
         "[stepping] tail_fraction_max must lie in (0, 1)");
    need(c.stepping.growth_factor > 1.0, "[stepping] growth_factor must exceed 1");
    need(c.stepping.t_end > 0.0, "[stepping] t_end must be positive");
    need(c.stepping.max_steps >= 1, "[stepping] max_steps must be at least 1");

    need(c.diagnostics.record_stride >= 1, "[diagnostics] record_stride must be at least 1");
    need(c.diagnostics.checkpoint_stride >= 0,
         "[diagnostics] checkpoint_stride must be nonnegative");
    need(!c.diagnostics.radii.empty(), "[diagnostics] radii must not be empty");
    for (double R : c.diagnostics.radii)
        if (!(R > 0.0) || R > 0.5 * c.grid.length) {
            bad.push_back("[diagnostics] every radius must lie in (0, length/2]");
            break;
        }
    need(c.diagnostics.probe == "bilinear" || c.diagnostics.probe == "strichartz_schrodinger" ||
             c.diagnostics.probe == "strichartz_wave",
         "[diagnostics] probe must be bilinear, strichartz_schrodinger, or strichartz_wave");
    need(c.diagnostics.probe_trials >= 1, "[diagnostics] probe_trials must be at least 1");
    need(c.diagnostics.probe_nt >= 3, "[diagnostics] probe_nt must be at least 3");

    need(!c.out_dir.empty(), "[run] out_dir must not be empty");
    return bad;
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::vector<std::string> bad;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;

    auto complain = [&](const std::string& what) {
        std::ostringstream m;
        m << "line " << lineno << ": " << what;
        bad.push_back(m.str());
    };

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                complain("malformed section header '" + line + "'");
                continue;
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "grid" && section != "physics" && section != "schedule" &&
                section != "stepping" && section != "diagnostics" && section != "run")
                complain("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            complain("expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (section.empty()) {
            complain("key '" + key + "' appears before any section header");
            continue;
        }

        bool known = true, ok = true;
        long long iv;
        auto num = [&](double& dst) { ok = detail::parse_double_value(val, dst); };
        auto lst = [&](std::vector<double>& dst) { ok = detail::parse_list_value(val, dst); };
        auto bl = [&](bool& dst) { ok = detail::parse_bool_value(val, dst); };
        auto str = [&](std::string& dst) { dst = val; };

        if (section == "grid") {
            if (key == "m") {
                ok = detail::parse_int_value(val, iv);
                c.grid.m = static_cast<int>(iv);
            } else if (key == "length")
                num(c.grid.length);
            else
                known = false;
        } else if (section == "physics") {
            if (key == "s") num(c.physics.s);
            else if (key == "coupling") bl(c.physics.coupling);
            else if (key == "u_kind") str(c.physics.u_kind);
            else if (key == "u_amplitude") num(c.physics.u_amplitude);
            else if (key == "u_sigma") num(c.physics.u_sigma);
            else if (key == "mu") num(c.physics.mu);
            else if (key == "mass_ratio") num(c.physics.mass_ratio);
            else if (key == "mass_factor") num(c.physics.mass_factor);
            else if (key == "u_file") str(c.physics.u_file);
            else if (key == "n_kind") str(c.physics.n_kind);
            else if (key == "n_amplitude") num(c.physics.n_amplitude);
            else if (key == "n_sigma") num(c.physics.n_sigma);
            else if (key == "n_file") str(c.physics.n_file);
            else if (key == "w_kind") str(c.physics.w_kind);
            else if (key == "w_amplitude") num(c.physics.w_amplitude);
            else if (key == "w_sigma") num(c.physics.w_sigma);
            else if (key == "w_file") str(c.physics.w_file);
            else if (key == "radial_required") bl(c.physics.radial_required);
            else known = false;
        } else if (section == "schedule") {
            if (key == "eps") num(c.schedule.eps);
            else if (key == "n_min") num(c.schedule.n_min);
            else if (key == "n_max") num(c.schedule.n_max);
            else if (key == "fixed_n") num(c.schedule.fixed_n);
            else known = false;
        } else if (section == "stepping") {
            if (key == "dt_base") num(c.stepping.dt_base);
            else if (key == "dt_min") num(c.stepping.dt_min);
            else if (key == "c_local") num(c.stepping.c_local);
            else if (key == "tail_fraction_max") num(c.stepping.tail_fraction_max);
            else if (key == "growth_factor") num(c.stepping.growth_factor);
            else if (key == "t_end") num(c.stepping.t_end);
            else if (key == "adaptive") bl(c.stepping.adaptive);
            else if (key == "max_steps") {
                ok = detail::parse_int_value(val, iv);
                c.stepping.max_steps = iv;
            } else
                known = false;
        } else if (section == "diagnostics") {
            if (key == "record_stride") {
                ok = detail::parse_int_value(val, iv);
                c.diagnostics.record_stride = static_cast<int>(iv);
            } else if (key == "energies_in_records")
                bl(c.diagnostics.energies_in_records);
            else if (key == "checkpoint_stride") {
                ok = detail::parse_int_value(val, iv);
                c.diagnostics.checkpoint_stride = iv;
            } else if (key == "radii")
                lst(c.diagnostics.radii);
            else if (key == "probe") str(c.diagnostics.probe);
            else if (key == "probe_q") num(c.diagnostics.probe_q);
            else if (key == "probe_r") num(c.diagnostics.probe_r);
            else if (key == "probe_trials") {
                ok = detail::parse_int_value(val, iv);
                c.diagnostics.probe_trials = static_cast<int>(iv);
            } else if (key == "probe_window")
                num(c.diagnostics.probe_window);
            else if (key == "probe_nt") {
                ok = detail::parse_int_value(val, iv);
                c.diagnostics.probe_nt = static_cast<int>(iv);
            } else if (key == "probe_delta")
                num(c.diagnostics.probe_delta);
            else if (key == "probe_n2")
                num(c.diagnostics.probe_n2);
            else if (key == "probe_n1_ladder")
                lst(c.diagnostics.probe_n1_ladder);
            else if (key == "sweep_n_ladder")
                lst(c.diagnostics.sweep_n_ladder);
            else if (key == "drift_band_lo")
                num(c.diagnostics.drift_band_lo);
            else if (key == "drift_band_hi")
                num(c.diagnostics.drift_band_hi);
            else if (key == "drift_power")
                num(c.diagnostics.drift_power);
            else if (key == "drift_l2")
                num(c.diagnostics.drift_l2);
            else if (key == "drift_delta")
                num(c.diagnostics.drift_delta);
            else if (key == "drift_dt")
                num(c.diagnostics.drift_dt);
            else
                known = false;
        } else if (section == "run") {
            if (key == "seed") {
                ok = detail::parse_int_value(val, iv) && iv >= 0;
                c.seed = static_cast<std::uint64_t>(iv);
            } else if (key == "out_dir")
                str(c.out_dir);
            else
                known = false;
        }

        if (!known)
            complain("unknown key '" + key + "' in [" + section + "]");
        else if (!ok)
            complain("cannot parse value '" + val + "' for key '" + key + "'");
    }

    for (const auto& v : validate_config(c)) bad.push_back(v);
    if (!bad.empty()) throw ConfigError(std::move(bad));
    return c;
}

inline std::string serialize_config(const RunConfig& c) {
    using detail::format_double;
    using detail::format_list;
    std::ostringstream o;
    auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << "\n"; };
    auto kb = [&](const char* k, bool v) { kv(k, v ? "on" : "off"); };

    o << "[grid]\n";
    kv("m", std::to_string(c.grid.m));
    kv("length", format_double(c.grid.length));
    o << "\n[physics]\n";
    kv("s", format_double(c.physics.s));
    kb("coupling", c.physics.coupling);
    kv("u_kind", c.physics.u_kind);
    kv("u_amplitude", format_double(c.physics.u_amplitude));
    kv("u_sigma", format_double(c.physics.u_sigma));
    kv("mu", format_double(c.physics.mu));
    kv("mass_ratio", format_double(c.physics.mass_ratio));
    kv("mass_factor", format_double(c.physics.mass_factor));
    if (!c.physics.u_file.empty()) kv("u_file", c.physics.u_file);
    kv("n_kind", c.physics.n_kind);
    kv("n_amplitude", format_double(c.physics.n_amplitude));
    kv("n_sigma", format_double(c.physics.n_sigma));
    if (!c.physics.n_file.empty()) kv("n_file", c.physics.n_file);
    kv("w_kind", c.physics.w_kind);
    kv("w_amplitude", format_double(c.physics.w_amplitude));
    kv("w_sigma", format_double(c.physics.w_sigma));
    if (!c.physics.w_file.empty()) kv("w_file", c.physics.w_file);
    kb("radial_required", c.physics.radial_required);
    o << "\n[schedule]\n";
    kv("eps", format_double(c.schedule.eps));
    kv("n_min", format_double(c.schedule.n_min));
    kv("n_max", format_double(c.schedule.n_max));
    kv("fixed_n", format_double(c.schedule.fixed_n));
    o << "\n[stepping]\n";
    kv("dt_base", format_double(c.stepping.dt_base));
    kv("dt_min", format_double(c.stepping.dt_min));
    kv("c_local", format_double(c.stepping.c_local));
    kv("tail_fraction_max", format_double(c.stepping.tail_fraction_max));
    kv("growth_factor", format_double(c.stepping.growth_factor));
    kv("t_end", format_double(c.stepping.t_end));
    kb("adaptive", c.stepping.adaptive);
    kv("max_steps", std::to_string(c.stepping.max_steps));
    o << "\n[diagnostics]\n";
    kv("record_stride", std::to_string(c.diagnostics.record_stride));
    kb("energies_in_records", c.diagnostics.energies_in_records);
    kv("checkpoint_stride", std::to_string(c.diagnostics.checkpoint_stride));
    kv("radii", format_list(c.diagnostics.radii));
    kv("probe", c.diagnostics.probe);
    kv("probe_q", format_double(c.diagnostics.probe_q));
    kv("probe_r", format_double(c.diagnostics.probe_r));
    kv("probe_trials", std::to_string(c.diagnostics.probe_trials));
    kv("probe_window", format_double(c.diagnostics.probe_window));
    kv("probe_nt", std::to_string(c.diagnostics.probe_nt));
    kv("probe_delta", format_double(c.diagnostics.probe_delta));
    kv("probe_n2", format_double(c.diagnostics.probe_n2));
    kv("probe_n1_ladder", format_list(c.diagnostics.probe_n1_ladder));
    kv("sweep_n_ladder", format_list(c.diagnostics.sweep_n_ladder));
    kv("drift_band_lo", format_double(c.diagnostics.drift_band_lo));
    kv("drift_band_hi", format_double(c.diagnostics.drift_band_hi));
    kv("drift_power", format_double(c.diagnostics.drift_power));
    kv("drift_l2", format_double(c.diagnostics.drift_l2));
    kv("drift_delta", format_double(c.diagnostics.drift_delta));
    kv("drift_dt", format_double(c.diagnostics.drift_dt));
    o << "\n[run]\n";
    kv("seed", std::to_string(c.seed));
    kv("out_dir", c.out_dir);
    return o.str();
}

inline std::uint64_t config_hash(const RunConfig& c) {
    const std::string s = serialize_config(c);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// converters into the module-facing types

inline Grid2D to_grid(const RunConfig& c) { return Grid2D{c.grid.m, c.grid.length}; }

inline InitialData to_initial_data(const RunConfig& c) {
    InitialData d;
    const auto& p = c.physics;
    if (p.u_kind == "zero") d.u_kind = InitialData::UKind::zero;
    else if (p.u_kind == "gaussian") d.u_kind = InitialData::UKind::gaussian;
    else if (p.u_kind == "townes_scaled") d.u_kind = InitialData::UKind::townes_scaled;
    else d.u_kind = InitialData::UKind::custom;
    d.u_amplitude = p.u_amplitude;
    d.u_sigma = p.u_sigma;
    d.mu = p.mu;
    d.mass_ratio = p.mass_ratio;
    d.mass_factor = p.mass_factor;
    d.u_file = p.u_file;
    if (p.n_kind == "zero") d.n_kind = InitialData::NKind::zero;
    else if (p.n_kind == "gaussian") d.n_kind = InitialData::NKind::gaussian;
    else if (p.n_kind == "minus_u_sq") d.n_kind = InitialData::NKind::minus_u_sq;
    else d.n_kind = InitialData::NKind::custom;
    d.n_amplitude = p.n_amplitude;
    d.n_sigma = p.n_sigma;
    d.n_file = p.n_file;
    if (p.w_kind == "zero") d.w_kind = InitialData::WKind::zero;
    else if (p.w_kind == "gaussian") d.w_kind = InitialData::WKind::gaussian;
    else d.w_kind = InitialData::WKind::custom;
    d.w_amplitude = p.w_amplitude;
    d.w_sigma = p.w_sigma;
    d.w_file = p.w_file;
    d.radial_required = p.radial_required;
    d.seed = c.seed;
    return d;
}

inline IntegrationConfig to_integration_config(const RunConfig& c) {
    IntegrationConfig ic;
    ic.control.dt_base = c.stepping.dt_base;
    ic.control.dt_min = c.stepping.dt_min;
    ic.control.c_local = c.stepping.c_local;
    ic.control.eps = c.schedule.eps;
    ic.control.tail_fraction_max = c.stepping.tail_fraction_max;
    ic.schedule.s = c.physics.s;
    ic.schedule.eps = c.schedule.eps;
    ic.schedule.n_min = c.schedule.n_min;
    ic.schedule.n_max = c.schedule.n_max;
    ic.schedule.fixed_n = c.schedule.fixed_n;
    ic.t_end = c.stepping.t_end;
    ic.growth_factor = c.stepping.growth_factor;
    ic.coupling = c.physics.coupling;
    ic.adaptive = c.stepping.adaptive;
    ic.record_stride = c.diagnostics.record_stride;
    ic.energies_in_records = c.diagnostics.energies_in_records;
    ic.max_steps = c.stepping.max_steps;
    return ic;
}

inline DriftConfig to_drift_config(const RunConfig& c) {
    DriftConfig dc;
    dc.grid = to_grid(c);
    dc.band_lo = c.diagnostics.drift_band_lo;
    dc.band_hi = c.diagnostics.drift_band_hi;
    dc.spectral_power = c.diagnostics.drift_power;
    dc.component_l2 = c.diagnostics.drift_l2;
    dc.delta_exp = c.diagnostics.drift_delta;
    dc.dt = c.diagnostics.drift_dt;
    dc.seed = c.seed;
    return dc;
}

}  // namespace zlab
