#pragma once

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "zlab/multiplier.hpp"
#include "zlab/norms.hpp"
#include "zlab/state.hpp"

namespace zlab {

// All scalar functionals of one snapshot.  The two Hamiltonian forms are the
// (u, n, v) form, with v = grad applied to the wave potential rebuilt from nu,
// and the half-wave form using n_plus; they are discretizations of the same
// conserved quantity.  modified_H is the half-wave form evaluated on the
// smoothed pair (Iu, In_plus), E_Iu and H1 its focusing-energy split.
struct EnergyReport {
    double t = 0.0;
    double mass = 0.0;
    double H_vform = 0.0;
    double H_plusform = 0.0;
    double modified_H = 0.0;
    double E_Iu = 0.0;
    double H1 = 0.0;
    double Iv_half = 0.0;
    double identity_residual = 0.0;  // |modified_H - (H1 + Iv_half)|
};

inline EnergyReport energy_report(const ZakharovState& st, double N, double s) {
    const Grid2D& g = st.grid();
    const double h2 = g.spacing() * g.spacing();

    Field2D up = physical(st.u);
    Field2D np = physical(st.n);
    Field2D nup = physical(st.nu);

    EnergyReport rep;
    rep.t = st.t;
    rep.mass = l2_norm_sq(up);

    // cubic coupling and quadratic wave terms, all on shared physical arrays
    long double c_nuu = 0, c_nn = 0, c_nunu = 0;
    for (std::size_t i = 0; i < up.size(); ++i) {
        const double au2 = std::norm(up[i]);
        const double nr = np[i].real(), vr = nup[i].real();
        c_nuu += nr * au2;
        c_nn += nr * nr;
        c_nunu += vr * vr;
    }
    const double grad_u = grad_norm_sq(up);
    const double int_n_u2 = static_cast<double>(c_nuu) * h2;
    const double int_n2 = static_cast<double>(c_nn) * h2;
    const double int_nu2 = static_cast<double>(c_nunu) * h2;

    // v = grad(inverse-Lambda nu), reconstructed explicitly
    Field2D w = apply_multiplier(st.nu, MultiplierSpec::inv_lambda(), ZeroModePolicy::drop);
    const double v_sq = l2_norm_sq(apply_multiplier(w, MultiplierSpec::gradient(0)))
                      + l2_norm_sq(apply_multiplier(w, MultiplierSpec::gradient(1)));

    rep.H_vform = grad_u + int_n_u2 + 0.5 * int_n2 + 0.5 * v_sq;
    rep.H_plusform = grad_u + 0.5 * (int_n2 + int_nu2) + int_n_u2;

    // smoothed snapshot
    const MultiplierSpec I = MultiplierSpec::imethod(N, s);
    Field2D Iu = apply_multiplier(up, I);
    Field2D In = apply_multiplier(np, I);
    Field2D Inu = apply_multiplier(nup, I);

    long double m_cub = 0, m_nn = 0, m_nunu = 0, m_l4 = 0, m_sq = 0;
    for (std::size_t i = 0; i < Iu.size(); ++i) {
        const double au2 = std::norm(Iu[i]);
        const double nr = In[i].real(), vr = Inu[i].real();
        m_cub += nr * au2;
        m_nn += nr * nr;
        m_nunu += vr * vr;
        m_l4 += au2 * au2;
        const double q = nr + au2;
        m_sq += q * q;
    }
    const double grad_Iu = grad_norm_sq(Iu);
    rep.modified_H = grad_Iu + 0.5 * static_cast<double>(m_nn + m_nunu) * h2
                   + static_cast<double>(m_cub) * h2;
    rep.E_Iu = grad_Iu - 0.5 * static_cast<double>(m_l4) * h2;
    rep.H1 = rep.E_Iu + 0.5 * static_cast<double>(m_sq) * h2;
    rep.Iv_half = 0.5 * static_cast<double>(m_nunu) * h2;
    rep.identity_residual = std::abs(rep.modified_H - (rep.H1 + rep.Iv_half));
    return rep;
}

// The three instantaneous integrals whose sum is d(modified_H)/dt along the
// coupled flow u_t = i(lap u - n u), n+_t = -i Lambda(n+ + |u|^2):
//   term_1 = -Im int conj(lap Iu) (I(2n u) - 2 In Iu)
//   term_2 = +1/2 Im int conj(I(2n u)) (I(2n u) - 2 In Iu)
//   term_3 = +Im int conj(In+) Lambda(I(|u|^2) - |Iu|^2)
// Each vanishes when every active frequency of (u, n+) sits at or below N/2,
// since all products then stay in the band where the symbol is 1.
struct CommutatorTerms {
    double term_1 = 0.0;
    double term_2 = 0.0;
    double term_3 = 0.0;
    double sum() const { return term_1 + term_2 + term_3; }
};

inline CommutatorTerms commutator_terms(const ZakharovState& st, double N, double s) {
    const MultiplierSpec I = MultiplierSpec::imethod(N, s);
    Field2D up = physical(st.u);
    Field2D np = physical(st.n);

    Field2D Iu = apply_multiplier(up, I);
    Field2D In = apply_multiplier(np, I);
    Field2D Inp = apply_multiplier(n_plus_field(st), I);

    // 2n u and its smoothed image
    Field2D two_nu = up;
    for (std::size_t i = 0; i < two_nu.size(); ++i) two_nu[i] *= 2.0 * np[i].real();
    Field2D I2nu = apply_multiplier(two_nu, I);

    Field2D comm1 = I2nu;
    for (std::size_t i = 0; i < comm1.size(); ++i) comm1[i] -= 2.0 * In[i].real() * Iu[i];

    Field2D lap_Iu = apply_multiplier(Iu, MultiplierSpec::laplacian());

    // I(|u|^2) - |Iu|^2
    Field2D usq = up;
    for (std::size_t i = 0; i < usq.size(); ++i) usq[i] = std::norm(usq[i]);
    Field2D comm3 = apply_multiplier(usq, I);
    for (std::size_t i = 0; i < comm3.size(); ++i) comm3[i] -= std::norm(Iu[i]);
    Field2D lam_comm3 = apply_multiplier(comm3, MultiplierSpec::lambda());

    CommutatorTerms out;
    out.term_1 = -inner(lap_Iu, comm1).imag();
    out.term_2 = 0.5 * inner(I2nu, comm1).imag();
    out.term_3 = inner(Inp, lam_comm3).imag();
    return out;
}

// Frequency schedule N(Lambda): the cutoff grows as a power of the running
// maximum of ||u||_{H^s}, clamped to the band the grid can represent.
struct ISchedule {
    double s = 0.95;
    double eps = 1e-3;
    double n_min = 4.0;
    double n_max = 0.0;     // <= 0: use xi_max/3 of the grid at hand
    double fixed_n = 0.0;   // > 0: bypass the power law entirely
    double current_n = 0.0; // running value; never decreases once set
};

struct EpsilonRange {
    bool valid_strict = false;        // 0 < eps < (17s-16)/(69-68s), the p(s)<2 gate
    bool valid_loose = false;         // 0 < eps < (17-16s)/(69-68s), wider variant
    bool denominator_positive = false;  // 7s - 6 - (35-34s) eps > 0
    bool ok() const { return valid_strict && denominator_positive; }
};

// Two admissibility bounds are in circulation for eps at given s; they differ,
// and only the strict one is equivalent to p(s) < 2, so that one gates the
// schedule while both are reported.
inline EpsilonRange epsilon_range_valid(double s, double eps) {
    EpsilonRange r;
    const double strict_bound = (17.0 * s - 16.0) / (69.0 - 68.0 * s);
    const double loose_bound = (17.0 - 16.0 * s) / (69.0 - 68.0 * s);
    r.valid_strict = eps > 0.0 && eps < strict_bound;
    r.valid_loose = eps > 0.0 && eps < loose_bound;
    r.denominator_positive = 7.0 * s - 6.0 - (35.0 - 34.0 * s) * eps > 0.0;
    return r;
}

inline double schedule_exponent(double s, double eps) {
    const double den = 7.0 * s - 6.0 - (35.0 - 34.0 * s) * eps;
    if (!(den > 0.0)) {
        std::ostringstream msg;
        msg << "schedule_exponent: 7s-6-(35-34s)eps = " << den << " must be positive";
        throw std::invalid_argument(msg.str());
    }
    return (10.0 + 34.0 * eps) / den;
}

inline double n_schedule(double lambda_running_max, const ISchedule& sched) {
    if (sched.fixed_n > 0.0) return sched.fixed_n;
    const EpsilonRange r = epsilon_range_valid(sched.s, sched.eps);
    if (!r.ok()) {
        std::ostringstream msg;
        msg << "n_schedule: (s=" << sched.s << ", eps=" << sched.eps
            << ") fails the admissibility range 0 < eps < (17s-16)/(69-68s) "
            << "with positive exponent denominator";
        throw std::invalid_argument(msg.str());
    }
    const double ex = schedule_exponent(sched.s, sched.eps);
    const double raw = std::pow(std::max(lambda_running_max, 0.0), ex);
    const double hi = sched.n_max > 0.0 ? sched.n_max : raw;
    return std::min(std::max(raw, sched.n_min), std::max(hi, sched.n_min));
}

// growth exponent p(s) of the blow-up lower bound; < 2 exactly when s > 16/17
inline double ps_exponent(double s, double eps) {
    const double den = 7.0 * s - 6.0 - (35.0 - 34.0 * s) * eps;
    if (!(den > 0.0))
        throw std::invalid_argument("ps_exponent: exponent denominator must be positive");
    return 2.0 * (1.0 - s) * (10.0 + 34.0 * eps) / den;
}

// exact-rational evaluation for rational (s, eps)
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    Rational operator+(Rational o) const { return {num * o.den + o.num * den, den * o.den}; }
    Rational operator-(Rational o) const { return {num * o.den - o.num * den, den * o.den}; }
    Rational operator*(Rational o) const { return {num * o.num, den * o.den}; }
    Rational operator/(Rational o) const {
        if (o.num == 0) throw std::invalid_argument("Rational: division by zero");
        return {num * o.den, den * o.num};
    }
    bool operator==(Rational o) const { return num == o.num && den == o.den; }
    bool positive() const { return num > 0; }
};

inline Rational ps_exponent_rational(Rational s, Rational eps) {
    const Rational den = Rational(7) * s - Rational(6) - (Rational(35) - Rational(34) * s) * eps;
    if (!den.positive())
        throw std::invalid_argument("ps_exponent_rational: exponent denominator must be positive");
    return Rational(2) * (Rational(1) - s) * (Rational(10) + Rational(34) * eps) / den;
}

}  // namespace zlab
