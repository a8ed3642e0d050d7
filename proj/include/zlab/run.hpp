#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "diagnostics.hpp"
#include "dynamics.hpp"
#include "groundstate.hpp"
#include "io.hpp"
#include "state.hpp"

namespace zlab {

namespace detail {

// Field snapshots come in two layouts; the four-byte magic tells them apart.
inline Field2D load_field(const std::string& path, const Grid2D& g) {
    std::ifstream head(path, std::ios::binary);
    if (!head) throw std::runtime_error("cannot open field file '" + path + "'");
    char magic[4] = {};
    head.read(magic, 4);
    head.close();
    NamedField nf = std::memcmp(magic, "ZLF1", 4) == 0 ? read_field_binary(path)
                                                       : read_field_text(path);
    if (nf.field.grid() != g) {
        std::ostringstream msg;
        msg << "field file '" << path << "' holds an m=" << nf.field.grid().m
            << ", length " << nf.field.grid().length << " grid but the run uses m=" << g.m
            << ", length " << g.length;
        throw std::runtime_error(msg.str());
    }
    return std::move(nf.field);
}

}  // namespace detail

inline void run_ground_state(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const RadialProfile prof = solve_townes();
    write_profile(cfg.out_dir + "/profile.txt", prof);

    const Grid2D g = to_grid(cfg);
    const ProjectionResult proj = project_to_grid(prof, g, cfg.physics.mu);
    write_field_binary(cfg.out_dir + "/ground_state_grid.zlf", proj.field, "Q");

    using detail::fmt17;
    auto out = detail::open_output(cfg.out_dir + "/ground_state.txt");
    out << "q0 " << fmt17(prof.q0) << "\n";
    out << "mass " << fmt17(prof.mass) << "\n";
    out << "mass_threshold " << fmt17(mass_threshold(prof)) << "\n";
    out << "grad_sq " << fmt17(prof.grad_sq) << "\n";
    out << "l4 " << fmt17(prof.l4) << "\n";
    out << "pohozaev_mass_rel " << fmt17(std::abs(prof.grad_sq - prof.mass) / prof.mass)
        << "\n";
    out << "pohozaev_l4_rel " << fmt17(std::abs(prof.l4 - 2.0 * prof.mass) / (2.0 * prof.mass))
        << "\n";
    out << "grid_gn_ratio " << fmt17(gn_ratio(proj.field, prof.mass)) << "\n";
    out << "grid_under_resolved " << (proj.under_resolved ? 1 : 0) << "\n";
    out << "grid_boundary_ring_max " << fmt17(proj.boundary_ring_max) << "\n";
    if (!out) throw std::runtime_error("failed writing ground-state report");
}

// hash of the settings that determine the trajectory; resuming may change the
// output directory, diagnostics cadence, and stop controls, but nothing that
// would make the continued run diverge from the original one
inline std::uint64_t resume_hash(const RunConfig& cfg) {
    RunConfig t = cfg;
    t.stepping.t_end = 0.0;
    t.stepping.max_steps = 0;
    t.diagnostics = RunConfig{}.diagnostics;
    t.seed = 0;
    t.out_dir.clear();
    return config_hash(t);
}

inline IntegrationResult run_simulate(const RunConfig& cfg, const std::string& resume_path = {}) {
    std::filesystem::create_directories(cfg.out_dir);
    const Grid2D g = to_grid(cfg);
    const IntegrationConfig ic = to_integration_config(cfg);
    const std::uint64_t hash = resume_hash(cfg);
    const RadialProfile prof = solve_townes();

    {
        auto out = detail::open_output(cfg.out_dir + "/config.ini");
        out << serialize_config(cfg);
    }

    std::optional<Stepper> sp;
    ResumeInfo info;
    if (!resume_path.empty()) {
        const CheckpointData ck = read_checkpoint(resume_path);
        if (ck.config_hash != hash)
            throw std::runtime_error("checkpoint '" + resume_path +
                                     "' was written by a different configuration");
        sp.emplace(make_stepper(ck));
        info = ck.info;
    } else {
        const InitialData d = to_initial_data(cfg);
        std::optional<Field2D> uf, nf, wf;
        LoadedFields loaded;
        if (d.u_kind == InitialData::UKind::custom)
            loaded.u = &uf.emplace(detail::load_field(d.u_file, g));
        if (d.n_kind == InitialData::NKind::custom)
            loaded.n = &nf.emplace(detail::load_field(d.n_file, g));
        if (d.w_kind == InitialData::WKind::custom)
            loaded.w = &wf.emplace(detail::load_field(d.w_file, g));
        sp.emplace(build_initial_state(d, g, &prof, loaded), cfg.physics.coupling);
    }

    TimeSeriesWriter writer(cfg.out_dir + "/time_series.tsv");
    IntegrationHooks hooks;
    hooks.on_record = [&](const TimeSeriesRecord& r) { writer.write(r); };
    hooks.checkpoint_stride = cfg.diagnostics.checkpoint_stride;
    if (hooks.checkpoint_stride > 0)
        hooks.on_checkpoint = [&](const Stepper& s, const ResumeInfo& ri) {
            std::ostringstream name;
            name << cfg.out_dir << "/checkpoint_" << ri.step << ".zck";
            write_checkpoint(name.str(), s, ri, hash);
            write_checkpoint(cfg.out_dir + "/checkpoint_latest.zck", s, ri, hash);
        };

    const IntegrationResult res = integrate(*sp, ic, hooks, info);

    // end-of-run state is always resumable, whatever the checkpoint stride was
    write_checkpoint(cfg.out_dir + "/checkpoint_final.zck", *sp,
                     ResumeInfo{res.steps, res.lambda_max, res.final_n, res.initial_u_hs}, hash);

    write_field_binary(cfg.out_dir + "/u_final.zlf", res.final_state.u, "u");
    write_field_binary(cfg.out_dir + "/n_final.zlf", res.final_state.n, "n");
    write_field_binary(cfg.out_dir + "/nu_final.zlf", res.final_state.nu, "nu");

    using detail::fmt17;
    if (res.stop != StopReason::failure) {
        const ConcentrationReport rep =
            concentration_scan(res.final_state, prof.mass, cfg.diagnostics.radii);
        std::ostringstream note;
        note << "last resolved time t=" << fmt17(res.t_stop) << " stop=" << to_string(res.stop);
        write_concentration(cfg.out_dir + "/concentration.tsv", rep, note.str());
    }

    {
        auto out = detail::open_output(cfg.out_dir + "/run_summary.txt");
        out << "stop " << to_string(res.stop) << "\n";
        out << "t_stop " << fmt17(res.t_stop) << "\n";
        out << "steps " << res.steps << "\n";
        out << "records " << res.records.size() << "\n";
        out << "lambda_max " << fmt17(res.lambda_max) << "\n";
        out << "final_N " << fmt17(res.final_n) << "\n";
        if (!res.message.empty()) out << "message " << res.message << "\n";
    }

    emit_plot_tables(cfg.out_dir);
    return res;
}

inline ProbeResult run_probe(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const Grid2D g = to_grid(cfg);
    const auto& dg = cfg.diagnostics;
    ProbeResult res;
    if (dg.probe == "bilinear") {
        res = bilinear_probe(g, dg.probe_n1_ladder, dg.probe_n2, dg.probe_delta, dg.probe_trials,
                             cfg.seed);
    } else {
        const StrichartzKind kind = dg.probe == "strichartz_wave"
                                        ? StrichartzKind::wave
                                        : StrichartzKind::schrodinger_radial;
        res = strichartz_probe(g, kind, dg.probe_q, dg.probe_r, dg.probe_trials, cfg.seed,
                               dg.probe_window, dg.probe_nt);
    }
    write_probe_result(cfg.out_dir + "/probe_" + res.estimate_id + ".tsv", res);
    return res;
}

inline DriftSlopeResult run_sweep(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const DriftConfig dc = to_drift_config(cfg);
    const DriftSlopeResult res =
        drift_slope_experiment(dc, cfg.diagnostics.sweep_n_ladder, cfg.physics.s);
    write_drift_result(cfg.out_dir + "/sweep.tsv", res);
    emit_plot_tables(cfg.out_dir);
    return res;
}

inline ConcentrationReport run_concentration(const RunConfig& cfg,
                                             const std::string& resume_path) {
    if (resume_path.empty())
        throw std::runtime_error("concentration needs --resume <checkpoint>");
    std::filesystem::create_directories(cfg.out_dir);
    const CheckpointData ck = read_checkpoint(resume_path);
    // only the grid has to agree: the scan reads fields, not stepping parameters
    if (ck.grid() != to_grid(cfg))
        throw std::runtime_error("checkpoint grid does not match the [grid] section");
    Stepper sp = make_stepper(ck);
    const ZakharovState st = sp.snapshot();
    const RadialProfile prof = solve_townes();
    const ConcentrationReport rep = concentration_scan(st, prof.mass, cfg.diagnostics.radii);
    std::ostringstream note;
    note << "last resolved time t=" << detail::fmt17(st.t) << " stop=checkpoint";
    write_concentration(cfg.out_dir + "/concentration.tsv", rep, note.str());
    emit_plot_tables(cfg.out_dir);
    return rep;
}

}  // namespace zlab
