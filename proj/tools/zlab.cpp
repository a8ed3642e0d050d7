#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "zlab/run.hpp"

namespace {

zlab::RunConfig load_config(const std::string& path, const std::string& out_override) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    zlab::RunConfig cfg = zlab::parse_config(text.str());
    if (!out_override.empty()) cfg.out_dir = out_override;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral toolkit for the 2D Zakharov system"};
    app.require_subcommand(1);

    std::string config_path, resume_path, out_override;
    auto add_common = [&](CLI::App* sub, bool with_resume) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_override, "output directory (overrides the config)");
        if (with_resume)
            sub->add_option("--resume", resume_path, "checkpoint to restart from");
    };

    CLI::App* ground = app.add_subcommand("ground-state",
                                          "solve the radial ground-state profile and report "
                                          "its invariants");
    add_common(ground, false);
    CLI::App* simulate = app.add_subcommand("simulate",
                                            "evolve the coupled system and record the "
                                            "monitor time series");
    add_common(simulate, true);
    CLI::App* probe = app.add_subcommand("probe",
                                         "estimate a space-time inequality constant from "
                                         "free evolutions");
    add_common(probe, false);
    CLI::App* sweep = app.add_subcommand("sweep",
                                         "measure modified-energy drift against the "
                                         "smoothing frequency");
    add_common(sweep, false);
    CLI::App* conc = app.add_subcommand("concentration",
                                        "scan ball masses around the origin and the "
                                        "field peak of a checkpointed state");
    add_common(conc, true);

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        const zlab::RunConfig cfg = load_config(config_path, out_override);
        if (sub == ground) {
            zlab::run_ground_state(cfg);
        } else if (sub == simulate) {
            const zlab::IntegrationResult res = zlab::run_simulate(cfg, resume_path);
            std::cout << "stop=" << zlab::to_string(res.stop) << " t=" << res.t_stop
                      << " steps=" << res.steps << "\n";
        } else if (sub == probe) {
            const zlab::ProbeResult res = zlab::run_probe(cfg);
            std::cout << res.estimate_id << ": exponent=" << res.fitted_exponent
                      << " r2=" << res.fit_r2 << (res.inconclusive ? " (inconclusive)" : "")
                      << "\n";
        } else if (sub == sweep) {
            const zlab::DriftSlopeResult res = zlab::run_sweep(cfg);
            std::cout << "drift slope=" << res.slope << " (half dt: " << res.slope_half_dt
                      << ") r2=" << res.fit_r2 << (res.inconclusive ? " (inconclusive)" : "")
                      << "\n";
        } else {
            zlab::run_concentration(cfg, resume_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "zlab " << name << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
