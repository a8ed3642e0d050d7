#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zlab/diagnostics.hpp"
#include "zlab/dynamics.hpp"
#include "zlab/groundstate.hpp"

namespace zlab {

namespace detail {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated binary file");
}

inline void write_string(std::ostream& out, const std::string& s) {
    const std::uint32_t n = static_cast<std::uint32_t>(s.size());
    write_pod(out, n);
    out.write(s.data(), n);
}

inline std::string read_string(std::istream& in) {
    std::uint32_t n = 0;
    read_pod(in, n);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw std::runtime_error("truncated binary file");
    return s;
}

inline std::ifstream open_input(const std::string& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::string& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// field snapshots

inline void write_field_binary(const std::string& path, const Field2D& f,
                               const std::string& name) {
    auto out = detail::open_output(path, std::ios::binary);
    out.write("ZLF1", 4);
    detail::write_pod(out, static_cast<std::int32_t>(f.grid().m));
    detail::write_pod(out, f.grid().length);
    detail::write_pod(out, static_cast<std::uint8_t>(f.repr() == Repr::spectral ? 1 : 0));
    detail::write_string(out, name);
    out.write(reinterpret_cast<const char*>(f.data()), f.size() * sizeof(cplx));
    if (!out) throw std::runtime_error("failed writing field to '" + path + "'");
}

struct NamedField {
    Field2D field;
    std::string name;
};

inline NamedField read_field_binary(const std::string& path) {
    auto in = detail::open_input(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "ZLF1", 4) != 0)
        throw std::runtime_error("'" + path + "' is not a field snapshot");
    std::int32_t m = 0;
    double length = 0;
    std::uint8_t repr = 0;
    detail::read_pod(in, m);
    detail::read_pod(in, length);
    detail::read_pod(in, repr);
    std::string name = detail::read_string(in);
    Field2D f(Grid2D{m, length}, repr ? Repr::spectral : Repr::physical);
    in.read(reinterpret_cast<char*>(f.data()), f.size() * sizeof(cplx));
    if (!in) throw std::runtime_error("truncated field snapshot '" + path + "'");
    return {std::move(f), std::move(name)};
}

inline void write_field_text(const std::string& path, const Field2D& f, const std::string& name) {
    auto out = detail::open_output(path);
    out << "# zlab-field m=" << f.grid().m << " length=" << detail::fmt17(f.grid().length)
        << " repr=" << (f.repr() == Repr::spectral ? "spectral" : "physical") << " name=" << name
        << "\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        out << detail::fmt17(f[i].real()) << " " << detail::fmt17(f[i].imag()) << "\n";
    if (!out) throw std::runtime_error("failed writing field to '" + path + "'");
}

inline NamedField read_field_text(const std::string& path) {
    auto in = detail::open_input(path);
    std::string header;
    std::getline(in, header);
    int m = 0;
    double length = 0;
    char reprbuf[16] = {0};
    char namebuf[256] = {0};
    if (std::sscanf(header.c_str(), "# zlab-field m=%d length=%lf repr=%15s name=%255s", &m,
                    &length, reprbuf, namebuf) < 3)
        throw std::runtime_error("'" + path + "' is not a text field snapshot");
    Field2D f(Grid2D{m, length},
              std::string(reprbuf) == "spectral" ? Repr::spectral : Repr::physical);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double re, im;
        if (!(in >> re >> im))
            throw std::runtime_error("truncated text field snapshot '" + path + "'");
        f[i] = cplx(re, im);
    }
    return {std::move(f), namebuf};
}

// ---------------------------------------------------------------------------
// ground-state profile

inline void write_profile(const std::string& path, const RadialProfile& p) {
    auto out = detail::open_output(path);
    out << "# zlab-profile\n";
    out << "# q0 " << detail::fmt17(p.q0) << "\n";
    out << "# mass " << detail::fmt17(p.mass) << "\n";
    out << "# grad_sq " << detail::fmt17(p.grad_sq) << "\n";
    out << "# l4 " << detail::fmt17(p.l4) << "\n";
    out << "# step " << detail::fmt17(p.step) << "\n";
    out << "# r_switch " << detail::fmt17(p.r_switch) << "\n";
    out << "# tail_coeff " << detail::fmt17(p.tail_coeff) << "\n";
    out << "# columns r q dq\n";
    for (std::size_t i = 0; i < p.r.size(); ++i)
        out << detail::fmt17(p.r[i]) << " " << detail::fmt17(p.q[i]) << " "
            << detail::fmt17(p.dq[i]) << "\n";
    if (!out) throw std::runtime_error("failed writing profile to '" + path + "'");
}

inline RadialProfile read_profile(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    std::getline(in, line);
    if (line != "# zlab-profile")
        throw std::runtime_error("'" + path + "' is not a ground-state profile");
    RadialProfile p;
    while (std::getline(in, line)) {
        if (line.rfind("# columns", 0) == 0) break;
        std::istringstream ls(line);
        std::string hash, key;
        double val;
        if (!(ls >> hash >> key >> val) || hash != "#")
            throw std::runtime_error("malformed profile header in '" + path + "'");
        if (key == "q0") p.q0 = val;
        else if (key == "mass") p.mass = val;
        else if (key == "grad_sq") p.grad_sq = val;
        else if (key == "l4") p.l4 = val;
        else if (key == "step") p.step = val;
        else if (key == "r_switch") p.r_switch = val;
        else if (key == "tail_coeff") p.tail_coeff = val;
        else throw std::runtime_error("unknown profile header key '" + key + "'");
    }
    double r, q, dq;
    while (in >> r >> q >> dq) {
        p.r.push_back(r);
        p.q.push_back(q);
        p.dq.push_back(dq);
    }
    if (p.r.empty()) throw std::runtime_error("profile '" + path + "' has no table rows");
    return p;
}

// ---------------------------------------------------------------------------
// time series

inline const char* time_series_header() {
    return "# t dt N mass H_vform modified_H E_Iu H1 u_hs iu_h1 n_plus_l2 in_plus_h1ms "
           "tail_fraction stop";
}

inline std::string format_record(const TimeSeriesRecord& r) {
    using detail::fmt17;
    std::string s;
    s.reserve(320);
    const double cols[] = {r.t,    r.dt,   r.N,       r.mass,         r.H_vform,
                           r.modified_H,  r.E_Iu,    r.H1,           r.u_hs,
                           r.iu_h1,       r.n_plus_l2, r.in_plus_h1ms, r.tail_fraction};
    for (double c : cols) {
        s += fmt17(c);
        s += '\t';
    }
    s += to_string(r.stop);
    return s;
}

// one row per record, flushed immediately so a killed run loses at most one row
class TimeSeriesWriter {
  public:
    explicit TimeSeriesWriter(const std::string& path)
        : out_(detail::open_output(path)), path_(path) {
        out_ << time_series_header() << "\n";
        out_.flush();
    }

    void write(const TimeSeriesRecord& r) {
        out_ << format_record(r) << "\n";
        out_.flush();
        if (!out_) throw std::runtime_error("failed writing time series to '" + path_ + "'");
    }

  private:
    std::ofstream out_;
    std::string path_;
};

inline StopReason stop_reason_from_string(const std::string& s) {
    if (s == "none") return StopReason::none;
    if (s == "t_end") return StopReason::reached_t_end;
    if (s == "blowup") return StopReason::blowup;
    if (s == "resolution") return StopReason::resolution;
    if (s == "failure") return StopReason::failure;
    if (s == "step_limit") return StopReason::step_limit;
    throw std::runtime_error("unknown stop flag '" + s + "'");
}

inline std::vector<TimeSeriesRecord> read_time_series(const std::string& path) {
    auto in = detail::open_input(path);
    std::vector<TimeSeriesRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        TimeSeriesRecord r;
        std::string stop;
        if (!(ls >> r.t >> r.dt >> r.N >> r.mass >> r.H_vform >> r.modified_H >> r.E_Iu >>
              r.H1 >> r.u_hs >> r.iu_h1 >> r.n_plus_l2 >> r.in_plus_h1ms >> r.tail_fraction >>
              stop))
            break;  // partial final row from an interrupted run
        r.stop = stop_reason_from_string(stop);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// checkpoints

struct CheckpointData {
    std::uint64_t config_hash = 0;
    double t = 0.0;
    ResumeInfo info;
    bool coupling = true;
    int m = 0;
    double length = 0.0;
    std::vector<cplx> uh, nh, nuh;  // raw spectral coefficients

    Grid2D grid() const { return Grid2D{m, length}; }
};

inline void write_checkpoint(const std::string& path, const Stepper& sp, const ResumeInfo& info,
                             std::uint64_t config_hash) {
    auto out = detail::open_output(path, std::ios::binary);
    out.write("ZCK1", 4);
    detail::write_pod(out, config_hash);
    detail::write_pod(out, sp.t());
    detail::write_pod(out, info.step);
    detail::write_pod(out, info.lambda_max);
    detail::write_pod(out, info.current_n);
    detail::write_pod(out, info.initial_u_hs);
    detail::write_pod(out, static_cast<std::uint8_t>(sp.coupling() ? 1 : 0));
    detail::write_pod(out, static_cast<std::int32_t>(sp.grid().m));
    detail::write_pod(out, sp.grid().length);
    for (const Field2D* f : {&sp.u_hat(), &sp.n_hat(), &sp.nu_hat()})
        out.write(reinterpret_cast<const char*>(f->data()), f->size() * sizeof(cplx));
    if (!out) throw std::runtime_error("failed writing checkpoint to '" + path + "'");
}

inline CheckpointData read_checkpoint(const std::string& path) {
    auto in = detail::open_input(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "ZCK1", 4) != 0)
        throw std::runtime_error("'" + path + "' is not a checkpoint");
    CheckpointData ck;
    detail::read_pod(in, ck.config_hash);
    detail::read_pod(in, ck.t);
    detail::read_pod(in, ck.info.step);
    detail::read_pod(in, ck.info.lambda_max);
    detail::read_pod(in, ck.info.current_n);
    detail::read_pod(in, ck.info.initial_u_hs);
    std::uint8_t coupling = 1;
    detail::read_pod(in, coupling);
    ck.coupling = coupling != 0;
    std::int32_t m = 0;
    detail::read_pod(in, m);
    detail::read_pod(in, ck.length);
    ck.m = m;
    const std::size_t n = static_cast<std::size_t>(m) * m;
    for (std::vector<cplx>* v : {&ck.uh, &ck.nh, &ck.nuh}) {
        v->resize(n);
        in.read(reinterpret_cast<char*>(v->data()), n * sizeof(cplx));
    }
    if (!in) throw std::runtime_error("truncated checkpoint '" + path + "'");
    return ck;
}

inline Stepper make_stepper(const CheckpointData& ck) {
    const Grid2D g = ck.grid();
    auto to_field = [&](const std::vector<cplx>& v) {
        Field2D f(g, Repr::spectral);
        for (std::size_t i = 0; i < v.size(); ++i) f[i] = v[i];
        return f;
    };
    return Stepper(g, ck.t, to_field(ck.uh), to_field(ck.nh), to_field(ck.nuh), ck.coupling);
}

// ---------------------------------------------------------------------------
// report files

inline void write_concentration(const std::string& path, const ConcentrationReport& rep,
                                const std::string& note = {}) {
    auto out = detail::open_output(path);
    using detail::fmt17;
    out << "# zlab-concentration t " << fmt17(rep.t) << "\n";
    out << "# total_mass " << fmt17(rep.total_mass) << " profile_mass "
        << fmt17(rep.profile_mass) << "\n";
    out << "# peak_center " << fmt17(rep.at_max.center_coords[0]) << " "
        << fmt17(rep.at_max.center_coords[1]) << "\n";
    if (!note.empty()) out << "# note " << note << "\n";
    out << "# R u_ball_origin n_ball_origin q_ratio_origin u_ball_peak n_ball_peak "
           "q_ratio_peak\n";
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
        out << fmt17(rep.radii[i]) << " " << fmt17(rep.at_origin.u_ball_mass[i]) << " "
            << fmt17(rep.at_origin.n_ball_l1[i]) << " " << fmt17(rep.at_origin.q_mass_ratio[i])
            << " " << fmt17(rep.at_max.u_ball_mass[i]) << " " << fmt17(rep.at_max.n_ball_l1[i])
            << " " << fmt17(rep.at_max.q_mass_ratio[i]) << "\n";
    if (!out) throw std::runtime_error("failed writing concentration report to '" + path + "'");
}

inline void write_probe_result(const std::string& path, const ProbeResult& res) {
    auto out = detail::open_output(path);
    using detail::fmt17;
    out << "# zlab-probe " << res.estimate_id << "\n";
    out << "# fitted_exponent " << fmt17(res.fitted_exponent) << "\n";
    out << "# fit_r2 " << fmt17(res.fit_r2) << "\n";
    out << "# inconclusive " << (res.inconclusive ? 1 : 0) << "\n";
    out << "# parameter measured_lhs reference_rhs\n";
    for (const auto& s : res.samples)
        out << fmt17(s.parameter) << " " << fmt17(s.measured_lhs) << " "
            << fmt17(s.reference_rhs) << "\n";
    if (!out) throw std::runtime_error("failed writing probe result to '" + path + "'");
}

inline void write_drift_result(const std::string& path, const DriftSlopeResult& res) {
    auto out = detail::open_output(path);
    using detail::fmt17;
    out << "# zlab-sweep\n";
    out << "# slope " << fmt17(res.slope) << "\n";
    out << "# slope_half_dt " << fmt17(res.slope_half_dt) << "\n";
    out << "# fit_r2 " << fmt17(res.fit_r2) << "\n";
    out << "# energy_scale " << fmt17(res.energy_scale) << "\n";
    out << "# inconclusive " << (res.inconclusive ? 1 : 0) << "\n";
    out << "# N drift drift_half_dt\n";
    for (const auto& s : res.samples)
        out << fmt17(s.N) << " " << fmt17(s.drift) << " " << fmt17(s.drift_half_dt) << "\n";
    if (!out) throw std::runtime_error("failed writing sweep result to '" + path + "'");
}

// ---------------------------------------------------------------------------
// flat plotting tables

// splits run artifacts into two-column tables under <run_dir>/tables; byte
// deterministic, so re-invocation rewrites identical files
inline void emit_plot_tables(const std::string& run_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(run_dir);
    const fs::path series = dir / "time_series.tsv";
    const fs::path conc = dir / "concentration.tsv";
    const fs::path sweep = dir / "sweep.tsv";
    if (!fs::exists(series) && !fs::exists(conc) && !fs::exists(sweep))
        throw std::runtime_error(
            "emit_plot_tables: no series found in '" + run_dir +
            "'; expected time_series.tsv, concentration.tsv, or sweep.tsv");
    fs::create_directories(dir / "tables");
    using detail::fmt17;

    if (fs::exists(series)) {
        const auto rows = read_time_series(series.string());
        struct Col {
            const char* name;
            double TimeSeriesRecord::*member;
        };
        const Col cols[] = {{"dt", &TimeSeriesRecord::dt},
                            {"N", &TimeSeriesRecord::N},
                            {"mass", &TimeSeriesRecord::mass},
                            {"H_vform", &TimeSeriesRecord::H_vform},
                            {"modified_H", &TimeSeriesRecord::modified_H},
                            {"E_Iu", &TimeSeriesRecord::E_Iu},
                            {"H1", &TimeSeriesRecord::H1},
                            {"u_hs", &TimeSeriesRecord::u_hs},
                            {"iu_h1", &TimeSeriesRecord::iu_h1},
                            {"n_plus_l2", &TimeSeriesRecord::n_plus_l2},
                            {"in_plus_h1ms", &TimeSeriesRecord::in_plus_h1ms},
                            {"tail_fraction", &TimeSeriesRecord::tail_fraction}};
        for (const auto& col : cols) {
            auto out = detail::open_output((dir / "tables" / ("t_vs_" + std::string(col.name) +
                                                              ".tsv")).string());
            out << "# t " << col.name << "\n";
            for (const auto& r : rows)
                out << fmt17(r.t) << "\t" << fmt17(r.*col.member) << "\n";
        }
        auto out = detail::open_output((dir / "tables" / "t_vs_stop.tsv").string());
        out << "# t stop\n";
        for (const auto& r : rows) out << fmt17(r.t) << "\t" << to_string(r.stop) << "\n";
    }

    if (fs::exists(conc)) {
        auto in = detail::open_input(conc.string());
        std::vector<std::array<double, 7>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line.front() == '#') continue;
            std::array<double, 7> v{};
            std::istringstream ls(line);
            if (!(ls >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5] >> v[6])) break;
            rows.push_back(v);
        }
        const char* names[] = {"u_ball_mass",      "n_ball_l1",      "q_mass_ratio",
                               "u_ball_mass_peak", "n_ball_l1_peak", "q_mass_ratio_peak"};
        for (int c = 0; c < 6; ++c) {
            auto out = detail::open_output((dir / "tables" / ("R_vs_" + std::string(names[c]) +
                                                              ".tsv")).string());
            out << "# R " << names[c] << "\n";
            for (const auto& v : rows) out << fmt17(v[0]) << "\t" << fmt17(v[c + 1]) << "\n";
        }
    }

    if (fs::exists(sweep)) {
        auto in = detail::open_input(sweep.string());
        std::vector<std::array<double, 3>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line.front() == '#') continue;
            std::array<double, 3> v{};
            std::istringstream ls(line);
            if (!(ls >> v[0] >> v[1] >> v[2])) break;
            rows.push_back(v);
        }
        const char* names[] = {"logdrift", "logdrift_half_dt"};
        for (int c = 0; c < 2; ++c) {
            auto out = detail::open_output((dir / "tables" / ("logN_vs_" + std::string(names[c]) +
                                                              ".tsv")).string());
            out << "# log10_N log10_" << names[c] << "\n";
            for (const auto& v : rows)
                out << fmt17(std::log10(v[0])) << "\t" << fmt17(std::log10(v[c + 1])) << "\n";
        }
    }
}

}  // namespace zlab
