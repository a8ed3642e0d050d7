// Acceptance suite for the toolkit: ten independent checks, one line of output
// each, exit code equal to the number of failures.  Every check states its
// measured numbers so a regression is diagnosable from the log alone.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "zlab/config.hpp"
#include "zlab/diagnostics.hpp"
#include "zlab/dynamics.hpp"
#include "zlab/energetics.hpp"
#include "zlab/groundstate.hpp"
#include "zlab/io.hpp"
#include "zlab/multiplier.hpp"
#include "zlab/norms.hpp"
#include "zlab/run.hpp"
#include "zlab/state.hpp"

using namespace zlab;
namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

// collects sub-checks; the criterion passes only if every one held
struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            append("FAILED " + what);
        }
    }
    void note(const std::string& k, double v) { append(k + "=" + num(v)); }
    void append(const std::string& s) {
        if (!detail.empty()) detail += "  ";
        detail += s;
    }
};

// frozen output of the independent shooting integrator in the unit suite
constexpr double kOracleTownesMass = 11.700895887413806;

// ---------------------------------------------------------------------------
// 1. ground state

Check crit_ground_state() {
    Check c;
    const RadialProfile p = solve_townes();
    const double poh_mass = std::abs(p.grad_sq - p.mass) / p.mass;
    const double poh_l4 = std::abs(p.l4 - 2.0 * p.mass) / (2.0 * p.mass);
    const double mass_rel = std::abs(p.mass - kOracleTownesMass) / kOracleTownesMass;
    c.note("pohozaev_mass", poh_mass);
    c.note("pohozaev_l4", poh_l4);
    c.note("oracle_mass_rel", mass_rel);
    c.require(poh_mass <= 1e-6, "grad-mass identity within 1e-6");
    c.require(poh_l4 <= 1e-6, "quartic-mass identity within 1e-6");
    c.require(mass_rel <= 1e-4, "mass within 1e-4 of the shooting oracle");

    const Grid2D g(128, 16.0);
    const ProjectionResult proj = project_to_grid(p, g, 1.0);
    const double ratio = gn_ratio(proj.field, p.mass);
    c.note("gn_ratio", ratio);
    c.require(std::abs(ratio - 1.0) <= 1e-3, "sharp-constant ratio of projected profile is 1");
    c.require(!proj.under_resolved, "projection resolved on the 128^2 grid");
    return c;
}

// ---------------------------------------------------------------------------
// 2. conservation over [0, 1]

struct DriftPair {
    double mass = 0.0, ham = 0.0;
};

DriftPair conservation_drift(const Grid2D& g, const RadialProfile& prof, double dt) {
    ZakharovState st = build_initial_state(testhelp::gaussian_data(0.64), g, &prof);
    Stepper sp(st);
    const EnergyReport e0 = energy_report(sp.snapshot(), 10.0, 0.95);
    const long long steps = std::llround(1.0 / dt);
    const long long sample = steps / 10;
    DriftPair d;
    for (long long k = 1; k <= steps; ++k) {
        sp.step(dt);
        if (k % sample == 0) {
            const EnergyReport e = energy_report(sp.snapshot(), 10.0, 0.95);
            d.mass = std::max(d.mass, std::abs(e.mass - e0.mass) / e0.mass);
            d.ham = std::max(d.ham,
                             std::abs(e.H_vform - e0.H_vform) / std::abs(e0.H_vform));
        }
    }
    return d;
}

Check crit_conservation() {
    Check c;
    const Grid2D g(128, 16.0);
    const RadialProfile prof = solve_townes();
    const DriftPair d1 = conservation_drift(g, prof, 1e-3);
    const DriftPair d2 = conservation_drift(g, prof, 5e-4);
    const double ratio = d1.ham / d2.ham;
    c.note("mass_drift", d1.mass);
    c.note("H_drift", d1.ham);
    c.note("halving_ratio", ratio);
    c.require(d1.mass <= 1e-10, "relative mass drift at dt=1e-3 within 1e-10");
    c.require(d1.ham <= 1e-5, "relative Hamiltonian drift at dt=1e-3 within 1e-5");
    c.require(ratio >= 3.0 && ratio <= 5.5, "drift drops ~4x when dt is halved");
    return c;
}

// ---------------------------------------------------------------------------
// 3. energy-form identities on random states

Check crit_energy_forms() {
    Check c;
    const Grid2D g(64, 8.0);
    std::mt19937_64 rng(20);
    double worst_forms = 0.0, worst_split = 0.0;
    for (int k = 0; k < 100; ++k) {
        const ZakharovState st = testhelp::random_state(g, rng);
        const EnergyReport er = energy_report(st, 7.0, 0.95);
        const double scale =
            std::max({1.0, std::abs(er.H_vform), std::abs(er.H_plusform)});
        worst_forms = std::max(worst_forms, std::abs(er.H_vform - er.H_plusform) / scale);
        worst_split = std::max(
            worst_split, std::abs(er.modified_H - (er.H1 + er.Iv_half)) / scale);
    }
    c.note("worst_form_gap", worst_forms);
    c.note("worst_split_gap", worst_split);
    c.require(worst_forms <= 1e-10, "two Hamiltonian forms agree within 1e-10");
    c.require(worst_split <= 1e-10, "modified energy splits into H1 + wave part");
    return c;
}

// ---------------------------------------------------------------------------
// 4. commutator terms vs a centered difference of the modified energy

ZakharovState evolve_copy(const ZakharovState& st, double span, int nsub) {
    Stepper sp(st);
    const double dt = span / nsub;
    for (int k = 0; k < nsub; ++k) sp.step(dt);
    return sp.snapshot();
}

double flow_derivative(const ZakharovState& st, double N, double s, double h) {
    const ZakharovState plus = evolve_copy(st, h, 16);
    const ZakharovState minus = evolve_copy(st, -h, 16);
    return (energy_report(plus, N, s).modified_H - energy_report(minus, N, s).modified_H) /
           (2.0 * h);
}

Check crit_commutator() {
    Check c;
    const Grid2D g(64, 16.0);
    const RadialProfile prof = solve_townes();
    ZakharovState st = build_initial_state(testhelp::gaussian_data(1.1), g, &prof);
    st = evolve_copy(st, 50 * 2e-3, 50);  // generic point on a real trajectory

    const double N = 3.0, s = 0.95;
    const double analytic = commutator_terms(st, N, s).sum();
    const double e1 = std::abs(analytic - flow_derivative(st, N, s, 4e-3));
    const double e2 = std::abs(analytic - flow_derivative(st, N, s, 2e-3));
    const double ratio = e1 / e2;
    c.note("analytic", analytic);
    c.note("err_h", e1);
    c.note("err_h_half", e2);
    c.note("ratio", ratio);
    c.require(e2 < e1, "error shrinks under halving");
    c.require(ratio >= 3.5 && ratio <= 4.5, "second-order agreement (ratio 4 +- 0.5)");
    return c;
}

// ---------------------------------------------------------------------------
// 5. modified-energy drift vs smoothing frequency

Check crit_drift_scaling() {
    Check c;
    const DriftConfig dc;  // 256^2 torus of length pi, seeded band data
    const double s = 0.95;
    const DriftSlopeResult res = drift_slope_experiment(dc, {8.0, 16.0, 32.0, 64.0}, s);
    c.note("slope", res.slope);
    c.note("slope_half_dt", res.slope_half_dt);
    c.note("r2", res.fit_r2);
    c.require(!res.inconclusive, "drift above the roundoff floor");
    c.require(res.slope <= -(2.0 - s) + 0.3, "slope at most -(2-s)+0.3 = -0.75");
    c.require(std::abs(res.slope - res.slope_half_dt) <= 0.1,
              "slope stable within 0.1 under dt halving");
    return c;
}

// ---------------------------------------------------------------------------
// 6. schedule arithmetic

Check crit_schedule() {
    Check c;
    const Rational limit = ps_exponent_rational(Rational(16, 17), Rational(0));
    c.require(limit == Rational(2), "exact rational exponent 2 at s=16/17, eps=0");

    bool interior_ok = true;
    double worst_p = 0.0;
    const double s_lo = 16.0 / 17.0;
    for (int i = 0; i < 50 && interior_ok; ++i) {
        const double s = s_lo + (i + 1) / 51.0 * (1.0 - s_lo);
        const double cap = (17.0 * s - 16.0) / (69.0 - 68.0 * s);
        for (int j = 0; j < 50; ++j) {
            const double eps = (j + 1) / 51.0 * cap;
            if (!epsilon_range_valid(s, eps).ok() || !(ps_exponent(s, eps) < 2.0)) {
                interior_ok = false;
                break;
            }
            worst_p = std::max(worst_p, ps_exponent(s, eps));
        }
    }
    c.note("max_p_on_grid", worst_p);
    c.require(interior_ok, "p(s,eps) < 2 and eps admissible on the 50x50 interior grid");

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> us(0.85, 1.0), ue(0.0, 0.3);
    bool consistent = true;
    for (int k = 0; k < 1000 && consistent; ++k) {
        const double s = us(rng), eps = ue(rng);
        const EpsilonRange er = epsilon_range_valid(s, eps);
        const bool strict = eps > 0.0 && eps < (17.0 * s - 16.0) / (69.0 - 68.0 * s);
        const bool loose = eps > 0.0 && eps < (17.0 - 16.0 * s) / (69.0 - 68.0 * s);
        const bool den_pos = 7.0 * s - 6.0 - (35.0 - 34.0 * s) * eps > 0.0;
        consistent = er.denominator_positive == den_pos && er.valid_strict == strict &&
                     er.valid_loose == loose;
    }
    c.require(consistent, "epsilon gates match the direct formulas on 1000 samples");
    return c;
}

// ---------------------------------------------------------------------------
// 7. bilinear refinement probe

Check crit_bilinear() {
    Check c;
    const Grid2D g(256, 2.0 * std::numbers::pi_v<double>);
    const ProbeResult res = bilinear_probe(g, {3.0, 6.0, 12.0, 24.0}, 48.0, 0.015, 8, 5);
    c.note("alpha", res.fitted_exponent);
    c.note("r2", res.fit_r2);
    c.require(!res.inconclusive, "probe conclusive");
    c.require(res.fitted_exponent >= 0.35 && res.fitted_exponent <= 0.65,
              "fitted frequency-separation gain in [0.35, 0.65]");
    return c;
}

// ---------------------------------------------------------------------------
// 8. focusing vs subthreshold phenomenology (snapshots shared with check 9)

struct Snap {
    ZakharovState st;
    double N = 0.0;
};
std::vector<Snap> g_snaps;

Check crit_blowup() {
    Check c;
    const double s = 0.95;
    const RadialProfile prof = solve_townes();

    // focusing run: 1.2x the critical mass, negative Hamiltonian
    const Grid2D g(256, 16.0);
    ZakharovState st = build_initial_state(testhelp::gaussian_data(1.2), g, &prof);
    Stepper sp(st);
    IntegrationConfig ic;
    ic.control.dt_base = 2e-3;
    ic.control.dt_min = 1e-4;
    ic.control.tail_fraction_max = 0.01;
    ic.schedule.s = s;
    ic.t_end = 12.0;
    ic.record_stride = 5;
    ic.energies_in_records = false;
    IntegrationHooks hooks;
    hooks.checkpoint_stride = 250;
    std::size_t ring = 0;
    hooks.on_checkpoint = [&](const Stepper& spp, const ResumeInfo& ri) {
        Snap snap{spp.snapshot(), ri.current_n};
        if (g_snaps.size() < 12) g_snaps.push_back(std::move(snap));
        else g_snaps[ring++ % 12] = std::move(snap);
    };
    const IntegrationResult res = integrate(sp, ic, hooks);
    g_snaps.push_back({res.final_state, res.final_n});

    c.append("stop=" + std::string(to_string(res.stop)));
    c.note("t_stop", res.t_stop);
    c.require(res.stop == StopReason::blowup || res.stop == StopReason::resolution,
              "focusing run terminates on blow-up or resolution loss");
    c.require(!res.records.empty(), "records captured");
    if (!res.records.empty()) {
        const double iu0 = res.records.front().iu_h1;
        const double in0 = res.records.front().in_plus_h1ms;
        double iu_peak = 0.0;
        bool wave_holds = true;
        for (const auto& r : res.records) {
            iu_peak = std::max(iu_peak, r.iu_h1);
            if (r.t >= 0.9 * res.t_stop && !(r.in_plus_h1ms > in0 / 10.0)) wave_holds = false;
        }
        c.note("iu_h1_growth", iu_peak / iu0);
        c.require(iu_peak / iu0 >= 10.0, "smoothed H1 norm grew at least tenfold");
        c.require(wave_holds, "smoothed wave norm stays above a tenth of its start");
    }

    const ConcentrationReport rep =
        concentration_scan(res.final_state, prof.mass, {2.0, 1.0, 0.5, 0.35});
    const double q_small = rep.at_max.q_mass_ratio.back();
    c.note("smallest_ball_q_ratio", q_small);
    c.require(q_small >= 0.9, "critical mass fraction in the smallest ball at the end");

    // subthreshold run: 0.8x the critical L2 norm, must coast to t = 10
    const Grid2D gs(128, 16.0);
    ZakharovState st2 = build_initial_state(testhelp::gaussian_data(0.64), gs, &prof);
    Stepper sp2(st2);
    IntegrationConfig ic2 = ic;
    ic2.t_end = 10.0;
    const IntegrationResult res2 = integrate(sp2, ic2);
    c.append("sub_stop=" + std::string(to_string(res2.stop)));
    c.require(res2.stop == StopReason::reached_t_end, "subthreshold run reaches t=10");
    if (!res2.records.empty()) {
        const double growth = res2.records.back().u_hs / res2.records.front().u_hs;
        c.note("sub_hs_growth", growth);
        c.require(growth < 3.0, "subthreshold Sobolev norm stays under 3x initial");
    }
    return c;
}

// ---------------------------------------------------------------------------
// 9. rescaling identities on the captured snapshots

Check crit_rescaling() {
    Check c;
    const double s = 0.95;
    c.require(!g_snaps.empty(), "snapshots available from the focusing run");
    int used = 0;
    double worst_l2 = 0.0, worst_grad = 0.0, worst_energy = 0.0;
    for (const Snap& snap : g_snaps) {
        const Field2D iu =
            apply_multiplier(snap.st.u, MultiplierSpec::imethod(snap.N, s));
        const double lam = std::sqrt(h1_norm_sq(iu));
        if (lam < 1.0) continue;
        const RescaledSnapshot rs = rescale_snapshot(snap.st, snap.N, s);
        ++used;
        worst_l2 = std::max(worst_l2, std::abs(rs.u_l2 - l2_norm(iu)) / l2_norm(iu));
        worst_grad = std::max(worst_grad, rs.u_grad_l2);
        worst_energy = std::max(worst_energy, rs.energy_identity_rel);
    }
    c.note("snapshots", used);
    c.note("worst_l2_gap", worst_l2);
    c.note("max_grad", worst_grad);
    c.note("worst_energy_gap", worst_energy);
    c.require(used >= 3, "at least 3 snapshots had unit-or-larger smoothed H1 norm");
    c.require(worst_l2 <= 1e-12, "rescaling preserves the L2 norm");
    c.require(worst_grad <= 1.0 + 1e-3, "rescaled gradient norm is at most 1");
    c.require(worst_energy <= 1e-3, "rescaled energy matches lambda^-2 E(Iu)");
    return c;
}

// ---------------------------------------------------------------------------
// 10. infrastructure

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check crit_infrastructure() {
    Check c;
    const fs::path root = "acceptance_scratch";
    fs::remove_all(root);
    fs::create_directories(root);

    RunConfig cfg;
    cfg.grid.m = 64;
    cfg.grid.length = 16.0;
    cfg.physics.u_kind = "gaussian";
    cfg.physics.u_sigma = 1.7;
    cfg.physics.n_kind = "minus_u_sq";
    cfg.stepping.adaptive = false;
    cfg.stepping.dt_base = 1e-3;
    cfg.stepping.t_end = 0.05;
    cfg.diagnostics.record_stride = 10;
    cfg.diagnostics.checkpoint_stride = 25;

    // config round trip is a fixed point
    const std::string s1 = serialize_config(cfg);
    const std::string s2 = serialize_config(parse_config(s1));
    c.require(s1 == s2, "config serialize-parse-serialize is a fixed point");
    c.require(config_hash(parse_config(s1)) == config_hash(cfg), "hash survives round trip");

    // reference run, identical rerun, and a restart from the midpoint checkpoint
    cfg.out_dir = (root / "ref").string();
    run_simulate(cfg);
    cfg.out_dir = (root / "ref2").string();
    run_simulate(cfg);
    c.require(slurp(root / "ref" / "time_series.tsv") ==
                  slurp(root / "ref2" / "time_series.tsv"),
              "rerun reproduces the time series byte for byte");
    c.require(slurp(root / "ref" / "u_final.zlf") == slurp(root / "ref2" / "u_final.zlf"),
              "rerun reproduces the final field byte for byte");

    cfg.out_dir = (root / "resumed").string();
    const IntegrationResult res =
        run_simulate(cfg, (root / "ref" / "checkpoint_25.zck").string());
    c.require(res.stop == StopReason::reached_t_end, "resumed run reaches t_end");
    c.require(slurp(root / "ref" / "u_final.zlf") ==
                  slurp(root / "resumed" / "u_final.zlf"),
              "restart reproduces the final field byte for byte");

    const auto ref_rows = read_time_series((root / "ref" / "time_series.tsv").string());
    const auto res_rows = read_time_series((root / "resumed" / "time_series.tsv").string());
    c.require(res_rows.size() >= 2, "resumed run recorded rows");
    std::size_t matched = 0;
    bool rows_equal = true;
    for (const auto& rb : res_rows)
        for (const auto& ra : ref_rows)
            if (ra.t == rb.t) {
                ++matched;
                rows_equal = rows_equal && ra.mass == rb.mass && ra.H_vform == rb.H_vform &&
                             ra.u_hs == rb.u_hs && ra.in_plus_h1ms == rb.in_plus_h1ms &&
                             ra.N == rb.N && ra.tail_fraction == rb.tail_fraction;
            }
    c.note("overlapping_rows", static_cast<double>(matched));
    c.require(matched == res_rows.size() && rows_equal,
              "every resumed record matches the uninterrupted run bitwise");
    return c;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Check()> fn;
    };
    const Entry entries[] = {
        {"ground state: Pohozaev identities, shooting-oracle mass, sharp-constant ratio",
         crit_ground_state},
        {"conservation: mass and Hamiltonian drift with order-2 step refinement",
         crit_conservation},
        {"energy forms: two Hamiltonian expressions and the modified-energy split",
         crit_energy_forms},
        {"commutator terms match the numerical derivative of the modified energy",
         crit_commutator},
        {"modified-energy drift decays with the smoothing frequency", crit_drift_scaling},
        {"schedule arithmetic: rational exponent, admissible region, epsilon gates",
         crit_schedule},
        {"bilinear refinement probe: fitted gain exponent", crit_bilinear},
        {"focusing run ends in concentrated blow-up; subthreshold run stays bounded",
         crit_blowup},
        {"rescaled snapshots: normalized gradient and energy identities", crit_rescaling},
        {"infrastructure: checkpoint restart, config round trip, deterministic reruns",
         crit_infrastructure},
    };

    int failures = 0;
    int index = 0;
    for (const Entry& e : entries) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Check c;
        try {
            c = e.fn();
        } catch (const std::exception& ex) {
            c.pass = false;
            c.append(std::string("exception: ") + ex.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d %s (%.1f s)%s%s\n", c.pass ? "PASS" : "FAIL", index, e.name,
                    secs, c.detail.empty() ? "" : "  ", c.detail.c_str());
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    if (failures == 0) std::printf("all %d checks passed\n", index);
    else std::printf("%d of %d checks FAILED\n", failures, index);
    return failures;
}
