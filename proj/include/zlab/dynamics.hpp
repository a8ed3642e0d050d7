#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zlab/energetics.hpp"
#include "zlab/state.hpp"

namespace zlab {

struct StepControl {
    double dt_base = 1e-3;
    double dt_min = 1e-5;
    double c_local = 1.0;            // constant in the local step-size law
    double eps = 1e-3;               // epsilon of the step-size exponent 2+17*eps
    double tail_fraction_max = 0.05; // resolution-guard trip level
};

inline void check_step_control(const StepControl& c) {
    if (!(c.dt_base > c.dt_min && c.dt_min > 0.0))
        throw std::invalid_argument("StepControl: need dt_base > dt_min > 0");
    if (!(c.eps > 0.0 && c.eps <= 0.05))
        throw std::invalid_argument("StepControl: need 0 < eps <= 0.05");
    if (!(c.tail_fraction_max > 0.0 && c.tail_fraction_max < 1.0))
        throw std::invalid_argument("StepControl: need tail_fraction_max in (0,1)");
    if (!(c.c_local > 0.0))
        throw std::invalid_argument("StepControl: need c_local > 0");
}

// delta = min{ (c/||In+||_{H^{1-s}})^(2+17eps), (c ||In+||_{H^{1-s}} / ||Iu||_{H^1}^2)^(2+17eps) },
// capped at dt_base and floored at dt_min
inline double local_step_delta_from_norms(double in_plus_h1ms, double iu_h1,
                                          const StepControl& c) {
    check_step_control(c);
    const double ex = 2.0 + 17.0 * c.eps;
    const double b1 = std::pow(c.c_local / in_plus_h1ms, ex);
    const double b2 = std::pow(c.c_local * in_plus_h1ms / (iu_h1 * iu_h1), ex);
    const double delta = std::fmin(b1, b2);
    return std::fmax(c.dt_min, std::fmin(c.dt_base, delta));
}

inline double local_step_delta(const ZakharovState& st, double N, double s,
                               const StepControl& c) {
    const MultiplierSpec I = MultiplierSpec::imethod(N, s);
    const double iu_h1 = std::sqrt(h1_norm_sq(apply_multiplier(st.u, I)));
    const double in_plus = sobolev_norm(apply_multiplier(n_plus_field(st), I), 1.0 - s);
    return local_step_delta_from_norms(in_plus, iu_h1, c);
}

struct MonitorRecord {
    double u_hs = 0.0;          // ||u||_{H^s}
    double iu_h1 = 0.0;         // ||Iu||_{H^1}
    double n_plus_l2 = 0.0;     // ||n+||_{L^2}
    double in_plus_h1ms = 0.0;  // ||In+||_{H^{1-s}}
    double mass = 0.0;          // ||u||_{L^2}^2
    double tail_u = 0.0;        // outer-third spectral fraction of ||u||^2
    bool blowup = false;
};

inline MonitorRecord blowup_monitor(const ZakharovState& st, double N, double s,
                                    double initial_u_hs = 0.0, double growth_factor = 10.0) {
    const MultiplierSpec I = MultiplierSpec::imethod(N, s);
    MonitorRecord m;
    m.u_hs = sobolev_norm(st.u, s);
    m.iu_h1 = std::sqrt(h1_norm_sq(apply_multiplier(st.u, I)));
    Field2D np = n_plus_field(st);
    m.n_plus_l2 = l2_norm(np);
    m.in_plus_h1ms = sobolev_norm(apply_multiplier(np, I), 1.0 - s);
    m.mass = l2_norm_sq(st.u);
    m.tail_u = tail_fraction(st.u);
    m.blowup = initial_u_hs > 0.0 && m.u_hs > growth_factor * initial_u_hs;
    return m;
}

inline double resolution_guard(const ZakharovState& st) { return tail_fraction(st.u); }

// Second-order splitting integrator that keeps the state in spectral form
// between steps: half-step exact linear flows (Schrodinger phase for u, a
// real rotation mixing (n, nu) for the wave pair), a full nonlinear step
// (phase rotation of u by the frozen density, which preserves |u| pointwise
// and hence the mass exactly; impulse -dt*Lambda applied to nu from the
// dealiased |u|^2), then the second linear half-step.  The density pair stays
// exactly real because every update preserves conjugate symmetry of its
// coefficients and the forcing is re-symmetrized before injection.
class Stepper {
  public:
    explicit Stepper(const ZakharovState& init, bool coupling = true)
        : Stepper(init.grid(), init.t, spectral(init.u), spectral(init.n), spectral(init.nu),
                  coupling) {}

    // exact spectral restore; this is the checkpoint path, so no rescaling or
    // projection may touch the coefficients
    Stepper(const Grid2D& g, double t, Field2D uh, Field2D nh, Field2D nuh, bool coupling = true)
        : grid_(g), t_(t), coupling_(coupling), uh_(std::move(uh)), nh_(std::move(nh)),
          nuh_(std::move(nuh)) {
        uh_.to_spectral();
        nh_.to_spectral();
        nuh_.to_spectral();
        if (uh_.grid() != grid_ || nh_.grid() != grid_ || nuh_.grid() != grid_)
            throw std::invalid_argument("Stepper: component grids disagree");
        nuh_[0] = 0.0;  // nu is mean-zero by contract
        const int m = grid_.m;
        absxi_.resize(grid_.size());
        xisq_.resize(grid_.size());
        outer_.resize(grid_.size());
        const int cut = grid_.dealias_cut();
        for (int ix = 0; ix < m; ++ix) {
            const double xx = grid_.wavenumber(ix);
            const bool row_out = std::abs(grid_.mode(ix)) > cut;
            for (int iy = 0; iy < m; ++iy) {
                const double yy = grid_.wavenumber(iy);
                const std::size_t idx = grid_.at(ix, iy);
                xisq_[idx] = xx * xx + yy * yy;
                absxi_[idx] = std::hypot(xx, yy);
                outer_[idx] = row_out || std::abs(grid_.mode(iy)) > cut;
            }
        }
        scratch_u_.resize(grid_.size());
        scratch_n_.resize(grid_.size());
        scratch_rho_.resize(grid_.size());
    }

    double t() const { return t_; }
    const Grid2D& grid() const { return grid_; }
    bool coupling() const { return coupling_; }
    const Field2D& u_hat() const { return uh_; }
    const Field2D& n_hat() const { return nh_; }
    const Field2D& nu_hat() const { return nuh_; }

    void step(double dt) {
        if (!(dt != 0.0) || !std::isfinite(dt))
            throw std::invalid_argument("Stepper: step size must be finite and nonzero");
        ensure_tables(dt);
        half_linear();
        if (coupling_) nonlinear_full(dt);
        half_linear();
        t_ += dt;
    }

    ZakharovState snapshot() const {
        ZakharovState st(grid_);
        st.t = t_;
        st.u = physical(uh_);
        st.n = physical(nh_);
        st.nu = physical(nuh_);
        project_real(st.n);
        project_real(st.nu);
        return st;
    }

    // all control norms in one spectral pass; s must stay fixed per run
    MonitorRecord monitors(double N, double s) {
        ensure_weight_tables(N, s);
        const double inv_l2 = 1.0 / (grid_.length * grid_.length);
        long double mass = 0, hs = 0, iu = 0, npl = 0, inp = 0, tail = 0;
        for (std::size_t i = 0; i < uh_.size(); ++i) {
            const double u2 = std::norm(uh_[i]);
            const double np2 = std::norm(nh_[i] + cplx(0, 1) * nuh_[i]);
            const double m2 = msym_[i] * msym_[i];
            mass += u2;
            hs += br_s_[i] * u2;
            iu += m2 * br_1_[i] * u2;
            npl += np2;
            inp += m2 * br_1ms_[i] * np2;
            if (outer_[i]) tail += u2;
        }
        MonitorRecord out;
        out.mass = static_cast<double>(mass) * inv_l2;
        out.u_hs = std::sqrt(static_cast<double>(hs) * inv_l2);
        out.iu_h1 = std::sqrt(static_cast<double>(iu) * inv_l2);
        out.n_plus_l2 = std::sqrt(static_cast<double>(npl) * inv_l2);
        out.in_plus_h1ms = std::sqrt(static_cast<double>(inp) * inv_l2);
        out.tail_u = mass > 0 ? static_cast<double>(tail / mass) : 0.0;
        return out;
    }

  private:
    void ensure_tables(double dt) {
        if (dt == table_dt_) return;
        table_dt_ = dt;
        phase_u_.resize(uh_.size());
        wave_c_.resize(uh_.size());
        wave_s_.resize(uh_.size());
        for (std::size_t i = 0; i < uh_.size(); ++i) {
            const double a = 0.5 * dt * xisq_[i];
            phase_u_[i] = cplx(std::cos(a), -std::sin(a));
            const double b = 0.5 * dt * absxi_[i];
            wave_c_[i] = std::cos(b);
            wave_s_[i] = std::sin(b);
        }
    }

    void ensure_weight_tables(double N, double s) {
        if (s != table_s_) {
            table_s_ = s;
            br_s_.resize(uh_.size());
            br_1_.resize(uh_.size());
            br_1ms_.resize(uh_.size());
            for (std::size_t i = 0; i < uh_.size(); ++i) {
                const double br = 1.0 + xisq_[i];
                br_s_[i] = std::pow(br, s);
                br_1_[i] = br;
                br_1ms_[i] = std::pow(br, 1.0 - s);
            }
            table_n_ = -1.0;  // msym depends on s too
        }
        if (N != table_n_) {
            table_n_ = N;
            msym_.resize(uh_.size());
            for (std::size_t i = 0; i < uh_.size(); ++i)
                msym_[i] = imethod_symbol(absxi_[i], N, s);
        }
    }

    void half_linear() {
        for (std::size_t i = 0; i < uh_.size(); ++i) {
            uh_[i] *= phase_u_[i];
            const cplx n0 = nh_[i], v0 = nuh_[i];
            nh_[i] = wave_c_[i] * n0 + wave_s_[i] * v0;
            nuh_[i] = -wave_s_[i] * n0 + wave_c_[i] * v0;
        }
    }

    void nonlinear_full(double dt) {
        auto& plans = detail::FftPlans::of(grid_.m);
        const double h2 = grid_.spacing() * grid_.spacing();
        const double inv_l2 = 1.0 / (grid_.length * grid_.length);

        // physical n (real part only drives the phase, so |u| is exact)
        copy_scaled_checkerboard(nh_.data(), scratch_n_.data(), inv_l2);
        plans.backward(scratch_n_.data());
        copy_scaled_checkerboard(uh_.data(), scratch_u_.data(), inv_l2);
        plans.backward(scratch_u_.data());

        for (std::size_t i = 0; i < scratch_u_.size(); ++i) {
            const double a = dt * scratch_n_[i].real();
            scratch_u_[i] *= cplx(std::cos(a), -std::sin(a));
            scratch_rho_[i] = std::norm(scratch_u_[i]);
        }

        // back to coefficients: u after the phase, |u|^2 for the wave impulse
        // (forward transform first, then the centering signs, as in to_spectral)
        std::copy(scratch_u_.begin(), scratch_u_.end(), uh_.data());
        plans.forward(uh_.data());
        copy_scaled_checkerboard(uh_.data(), uh_.data(), h2);
        plans.forward(scratch_rho_.data());
        copy_scaled_checkerboard(scratch_rho_.data(), scratch_rho_.data(), h2);

        // dealias the product, restore exact conjugate symmetry, inject
        const int m = grid_.m;
        for (int ix = 0; ix < m; ++ix) {
            for (int iy = 0; iy < m; ++iy) {
                const std::size_t idx = grid_.at(ix, iy);
                if (outer_[idx]) { scratch_rho_[idx] = 0.0; continue; }
                const std::size_t mir = grid_.at((m - ix) % m, (m - iy) % m);
                if (mir < idx) continue;
                const cplx sym = 0.5 * (scratch_rho_[idx] + std::conj(scratch_rho_[mir]));
                scratch_rho_[idx] = sym;
                scratch_rho_[mir] = std::conj(sym);
            }
        }
        for (std::size_t i = 0; i < nuh_.size(); ++i)
            nuh_[i] -= dt * absxi_[i] * scratch_rho_[i];
    }

    // out[j] = in[j] * scale * (-1)^(ix+iy); in == out allowed
    void copy_scaled_checkerboard(const cplx* in, cplx* out, double scale) const {
        const int m = grid_.m;
        for (int ix = 0; ix < m; ++ix) {
            const double row = (ix % 2 == 0) ? scale : -scale;
            const cplx* p = in + static_cast<std::size_t>(ix) * m;
            cplx* q = out + static_cast<std::size_t>(ix) * m;
            for (int iy = 0; iy < m; ++iy) q[iy] = p[iy] * ((iy % 2 == 0) ? row : -row);
        }
    }

    Grid2D grid_;
    double t_ = 0.0;
    bool coupling_ = true;
    Field2D uh_, nh_, nuh_;

    std::vector<double> absxi_, xisq_;
    std::vector<char> outer_;

    double table_dt_ = std::numeric_limits<double>::quiet_NaN();
    std::vector<cplx> phase_u_;
    std::vector<double> wave_c_, wave_s_;

    double table_s_ = std::numeric_limits<double>::quiet_NaN();
    double table_n_ = -1.0;
    std::vector<double> br_s_, br_1_, br_1ms_, msym_;

    std::vector<cplx> scratch_u_, scratch_n_, scratch_rho_;
};

// one pure splitting step; convenience wrapper over the stateful fast path
inline ZakharovState strang_step(const ZakharovState& st, double dt, bool coupling = true) {
    Stepper sp(st, coupling);
    sp.step(dt);
    return sp.snapshot();
}

enum class StopReason { none, reached_t_end, blowup, resolution, failure, step_limit };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::none: return "none";
        case StopReason::reached_t_end: return "t_end";
        case StopReason::blowup: return "blowup";
        case StopReason::resolution: return "resolution";
        case StopReason::failure: return "failure";
        case StopReason::step_limit: return "step_limit";
    }
    return "unknown";
}

struct TimeSeriesRecord {
    double t = 0.0;
    double dt = 0.0;  // step size the controller selects at this state
    double N = 0.0;
    double mass = 0.0;
    double H_vform = 0.0;
    double modified_H = 0.0;
    double E_Iu = 0.0;
    double H1 = 0.0;
    double u_hs = 0.0;
    double iu_h1 = 0.0;
    double n_plus_l2 = 0.0;
    double in_plus_h1ms = 0.0;
    double tail_fraction = 0.0;
    StopReason stop = StopReason::none;
};

struct IntegrationConfig {
    StepControl control;
    ISchedule schedule;      // carries s, eps, N clamps, fixed-N override
    double t_end = 1.0;
    double growth_factor = 10.0;  // blow-up flag level on ||u||_{H^s}
    bool coupling = true;
    bool adaptive = true;    // false: always step with dt_base
    int record_stride = 1;
    bool energies_in_records = true;
    long long max_steps = 2'000'000;
};

// loop state that must survive a checkpoint for bit-exact resumption
struct ResumeInfo {
    long long step = 0;
    double lambda_max = 0.0;   // running max of ||u||_{H^s}
    double current_n = 0.0;    // smoothing frequency (never decreases)
    double initial_u_hs = -1.0;  // blow-up baseline; negative means unset
};

struct IntegrationHooks {
    std::function<void(const TimeSeriesRecord&)> on_record;
    std::function<void(const Stepper&, const ResumeInfo&)> on_checkpoint;
    long long checkpoint_stride = 0;
};

struct IntegrationResult {
    std::vector<TimeSeriesRecord> records;
    StopReason stop = StopReason::none;
    double t_stop = 0.0;
    long long steps = 0;
    double lambda_max = 0.0;  // running max of ||u||_{H^s}
    double final_n = 0.0;
    double initial_u_hs = -1.0;
    ZakharovState final_state;
    std::string message;
};

// core loop; `info` carries resumed counters so a restarted run replays the
// remaining trajectory with identical arithmetic
inline IntegrationResult integrate(Stepper& sp, const IntegrationConfig& cfg,
                                   const IntegrationHooks& hooks = {}, ResumeInfo info = {}) {
    check_step_control(cfg.control);
    const double s = cfg.schedule.s;

    IntegrationResult out;
    out.final_state = sp.snapshot();

    ISchedule sched = cfg.schedule;
    if (sched.n_max <= 0.0) sched.n_max = sp.grid().xi_max() / 3.0;
    double N = sched.fixed_n > 0.0 ? sched.fixed_n
                                   : std::max({info.current_n, sched.current_n, sched.n_min});
    double initial_hs = info.initial_u_hs;
    out.lambda_max = info.lambda_max;

    for (long long step = info.step;; ++step) {
        MonitorRecord m = sp.monitors(N, s);
        if (initial_hs < 0.0) {
            initial_hs = m.u_hs;
            out.lambda_max = m.u_hs;
        }

        StopReason reason = StopReason::none;
        if (!std::isfinite(m.u_hs) || !std::isfinite(m.n_plus_l2)) {
            reason = StopReason::failure;
            std::ostringstream msg;
            msg << "non-finite field norms at t=" << sp.t();
            out.message = msg.str();
        } else {
            out.lambda_max = std::max(out.lambda_max, m.u_hs);
            if (sched.fixed_n <= 0.0)
                N = std::max(N, n_schedule(out.lambda_max, sched));
            if (m.tail_u > cfg.control.tail_fraction_max)
                reason = StopReason::resolution;
            else if (initial_hs > 0.0 && m.u_hs > cfg.growth_factor * initial_hs)
                reason = StopReason::blowup;
            else if (sp.t() >= cfg.t_end - 1e-14 * std::max(1.0, cfg.t_end))
                reason = StopReason::reached_t_end;
            else if (step >= cfg.max_steps)
                reason = StopReason::step_limit;
        }

        double dt = cfg.adaptive && reason == StopReason::none
                        ? local_step_delta_from_norms(m.in_plus_h1ms, m.iu_h1, cfg.control)
                        : cfg.control.dt_base;
        if (reason == StopReason::none && sp.t() + dt > cfg.t_end) dt = cfg.t_end - sp.t();

        if (reason != StopReason::none || step % cfg.record_stride == 0) {
            TimeSeriesRecord rec;
            rec.t = sp.t();
            rec.dt = dt;
            rec.N = N;
            rec.mass = m.mass;
            rec.u_hs = m.u_hs;
            rec.iu_h1 = m.iu_h1;
            rec.n_plus_l2 = m.n_plus_l2;
            rec.in_plus_h1ms = m.in_plus_h1ms;
            rec.tail_fraction = m.tail_u;
            rec.stop = reason;
            if (cfg.energies_in_records && reason != StopReason::failure) {
                const EnergyReport er = energy_report(sp.snapshot(), N, s);
                rec.H_vform = er.H_vform;
                rec.modified_H = er.modified_H;
                rec.E_Iu = er.E_Iu;
                rec.H1 = er.H1;
            }
            out.records.push_back(rec);
            if (hooks.on_record) hooks.on_record(rec);
        }

        if (reason != StopReason::none) {
            out.stop = reason;
            out.t_stop = sp.t();
            out.steps = step;
            out.final_n = N;
            out.initial_u_hs = initial_hs;
            out.final_state = sp.snapshot();
            return out;
        }

        sp.step(dt);
        if (hooks.checkpoint_stride > 0 && hooks.on_checkpoint &&
            (step + 1) % hooks.checkpoint_stride == 0) {
            ResumeInfo ri{step + 1, out.lambda_max, N, initial_hs};
            hooks.on_checkpoint(sp, ri);
        }
    }
}

inline IntegrationResult integrate(const ZakharovState& init, const IntegrationConfig& cfg,
                                   const IntegrationHooks& hooks = {}) {
    Stepper sp(init, cfg.coupling);
    return integrate(sp, cfg, hooks);
}

inline IntegrationResult integrate(const InitialData& init, const Grid2D& g,
                                   const RadialProfile* profile, const IntegrationConfig& cfg,
                                   const IntegrationHooks& hooks = {}) {
    return integrate(build_initial_state(init, g, profile), cfg, hooks);
}

}  // namespace zlab
