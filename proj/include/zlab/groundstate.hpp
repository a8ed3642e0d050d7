#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "zlab/field.hpp"
#include "zlab/norms.hpp"

namespace zlab {

// Radial profile table for the positive decaying solution of
//   Q'' + Q'/r - Q + Q^3 = 0,  Q'(0) = 0,
// solved by shooting on Q(0) with bisection.  Past r_switch the solution is
// continued by the matched modified-Bessel tail A*K0(r), which keeps the far
// field positive and monotone where the shot trajectory loses accuracy.
struct RadialProfile {
    std::vector<double> r;   // uniform nodes, r[0] = 0
    std::vector<double> q;
    std::vector<double> dq;
    double q0 = 0.0;         // Q(0)
    double mass = 0.0;       // 2 pi int Q^2 r dr
    double grad_sq = 0.0;    // 2 pi int Q'^2 r dr
    double l4 = 0.0;         // 2 pi int Q^4 r dr
    double step = 0.0;
    double r_switch = 0.0;   // start of the Bessel tail
    double tail_coeff = 0.0;
};

struct TownesParams {
    double r_max = 20.0;
    double dr = 1e-3;
    double bracket_lo = 2.0;
    double bracket_hi = 2.5;
    double r_switch = 12.0;
};

namespace detail {

inline void townes_rhs(double r, double Q, double P, double& dQ, double& dP) {
    dQ = P;
    dP = (r > 1e-12) ? (-P / r + Q - Q * Q * Q) : 0.5 * (Q - Q * Q * Q);
}

// integrate from the series start; returns +1 if Q crosses zero (shot high),
// -1 if Q turns back upward while positive (shot low), 0 if neither by r_cap
inline int townes_classify(double a, double dr, double r_cap) {
    const double r0 = 1e-6;
    const double c2 = 0.25 * (a - a * a * a);
    double r = r0, Q = a + c2 * r0 * r0, P = 2.0 * c2 * r0;
    while (r < r_cap) {
        double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
        townes_rhs(r, Q, P, k1q, k1p);
        townes_rhs(r + 0.5 * dr, Q + 0.5 * dr * k1q, P + 0.5 * dr * k1p, k2q, k2p);
        townes_rhs(r + 0.5 * dr, Q + 0.5 * dr * k2q, P + 0.5 * dr * k2p, k3q, k3p);
        townes_rhs(r + dr, Q + dr * k3q, P + dr * k3p, k4q, k4p);
        Q += dr / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
        P += dr / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        r += dr;
        if (Q <= 0.0) return +1;
        if (P >= 0.0 && Q < a) return -1;
        if (Q > 3.0 * a) return -1;
    }
    return 0;
}

}  // namespace detail

inline RadialProfile solve_townes(const TownesParams& prm = {}) {
    if (!(prm.dr > 0) || !(prm.r_max > prm.r_switch) || !(prm.r_switch > 1))
        throw std::invalid_argument("solve_townes: need dr > 0 and r_max > r_switch > 1");
    double lo = prm.bracket_lo, hi = prm.bracket_hi;
    const double r_cap = prm.r_switch + 2.0;
    if (detail::townes_classify(lo, prm.dr, r_cap) != -1 ||
        detail::townes_classify(hi, prm.dr, r_cap) != +1)
        throw std::runtime_error("solve_townes: bracket does not straddle the decaying solution");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (detail::townes_classify(mid, prm.dr, r_cap) == +1 ? hi : lo) = mid;
    }
    const double a = 0.5 * (lo + hi);

    RadialProfile out;
    out.q0 = a;
    out.step = prm.dr;
    out.r_switch = prm.r_switch;
    const int n_nodes = static_cast<int>(std::lround(prm.r_max / prm.dr)) + 1;
    out.r.resize(n_nodes);
    out.q.resize(n_nodes);
    out.dq.resize(n_nodes);

    const int i_switch = static_cast<int>(std::lround(prm.r_switch / prm.dr));
    // shot trajectory on [0, r_switch]; the equation is singular at r = 0, so
    // the first node comes from the power series and RK4 proceeds node to node
    {
        const double c2 = 0.25 * (a - a * a * a);
        const double c4 = c2 * (1.0 - 3.0 * a * a) / 16.0;
        out.r[0] = 0.0; out.q[0] = a; out.dq[0] = 0.0;
        double r = prm.dr;
        double Q = a + (c2 + c4 * r * r) * r * r;
        double P = (2.0 * c2 + 4.0 * c4 * r * r) * r;
        out.r[1] = r; out.q[1] = Q; out.dq[1] = P;
        for (int i = 2; i <= i_switch; ++i) {
            double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
            const double dr = prm.dr;
            detail::townes_rhs(r, Q, P, k1q, k1p);
            detail::townes_rhs(r + 0.5 * dr, Q + 0.5 * dr * k1q, P + 0.5 * dr * k1p, k2q, k2p);
            detail::townes_rhs(r + 0.5 * dr, Q + 0.5 * dr * k2q, P + 0.5 * dr * k2p, k3q, k3p);
            detail::townes_rhs(r + dr, Q + dr * k3q, P + dr * k3p, k4q, k4p);
            Q += dr / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
            P += dr / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
            r = i * prm.dr;
            out.r[i] = r; out.q[i] = Q; out.dq[i] = P;
        }
    }
    // matched K0 tail on (r_switch, r_max]
    const double A = out.q[i_switch] / std::cyl_bessel_k(0.0, prm.r_switch);
    out.tail_coeff = A;
    for (int i = i_switch + 1; i < n_nodes; ++i) {
        const double r = i * prm.dr;
        out.r[i] = r;
        out.q[i] = A * std::cyl_bessel_k(0.0, r);
        out.dq[i] = -A * std::cyl_bessel_k(1.0, r);
    }

    // composite Simpson of 2 pi f(r) r dr over the uniform table
    auto radint = [&](auto f) {
        long double acc = 0;
        const int n = n_nodes - 1;  // intervals
        for (int i = 0; i + 2 <= n; i += 2) {
            const double r0 = out.r[i], r1 = out.r[i + 1], r2 = out.r[i + 2];
            acc += prm.dr / 3.0 * (f(i) * r0 + 4 * f(i + 1) * r1 + f(i + 2) * r2);
        }
        if (n % 2 == 1)  // trapezoid on the last interval
            acc += 0.5 * prm.dr * (f(n - 1) * out.r[n - 1] + f(n) * out.r[n]);
        return 2.0 * M_PI * static_cast<double>(acc);
    };
    out.mass = radint([&](int i) { return out.q[i] * out.q[i]; });
    out.grad_sq = radint([&](int i) { return out.dq[i] * out.dq[i]; });
    out.l4 = radint([&](int i) { double v = out.q[i] * out.q[i]; return v * v; });
    return out;
}

// convenience entry: tolerance steers the integrator step (RK4, global
// error ~ dr^4), r_max the truncation radius
inline RadialProfile solve_townes(double tolerance, double r_max) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solve_townes: tolerance must be positive");
    TownesParams prm;
    prm.r_max = r_max;
    prm.dr = std::clamp(std::pow(tolerance, 0.25), 2e-4, 1e-3);
    return solve_townes(prm);
}

// L2 mass threshold below which no focusing is possible: returns ||Q||_L2
inline double mass_threshold(const RadialProfile& p) { return std::sqrt(p.mass); }

// monotone cubic (Fritsch-Carlson) interpolation of the profile table
inline double profile_value(const RadialProfile& p, double r) {
    if (r < 0.0) r = -r;
    const double rmax = p.r.back();
    if (r >= rmax) return 0.0;
    const int i = std::min(static_cast<int>(r / p.step), static_cast<int>(p.r.size()) - 2);
    const double h = p.step;
    const double d_in = (p.q[i + 1] - p.q[i]) / h;
    auto slope = [&](int k) -> double {
        if (k <= 0 || k + 1 >= static_cast<int>(p.r.size())) return p.dq[k];
        const double dl = (p.q[k] - p.q[k - 1]) / h, dr_ = (p.q[k + 1] - p.q[k]) / h;
        if (dl * dr_ <= 0.0) return 0.0;
        return 2.0 * dl * dr_ / (dl + dr_);
    };
    double m0 = (i == 0) ? 0.0 : slope(i);
    double m1 = slope(i + 1);
    // clamp to preserve monotonicity on the cell
    if (d_in == 0.0) { m0 = m1 = 0.0; }
    const double t = (r - p.r[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p.q[i] + (t3 - 2 * t2 + t) * h * m0
         + (-2 * t3 + 3 * t2) * p.q[i + 1] + (t3 - t2) * h * m1;
}

struct ProjectionResult {
    Field2D field;
    bool under_resolved = false;    // core narrower than a few cells
    double boundary_ring_max = 0.0; // largest |u| on the outermost ring
};

// u(x) = mu * Q(mu |x - c|): the L2-invariant rescaling of the profile
inline ProjectionResult project_to_grid(const RadialProfile& p, const Grid2D& g, double mu,
                                        std::array<double, 2> center = {0.0, 0.0}) {
    if (!(mu > 0.0)) throw std::invalid_argument("project_to_grid: mu must be positive");
    ProjectionResult out{Field2D(g, Repr::physical), false, 0.0};
    for (int ix = 0; ix < g.m; ++ix) {
        const double dx = periodic_delta(g.coord(ix), center[0], g.length);
        for (int iy = 0; iy < g.m; ++iy) {
            const double dy = periodic_delta(g.coord(iy), center[1], g.length);
            out.field.at(ix, iy) = mu * profile_value(p, mu * std::hypot(dx, dy));
        }
    }
    out.under_resolved = (1.0 / mu) < 3.0 * g.spacing();
    for (int ix = 0; ix < g.m; ++ix) {
        out.boundary_ring_max = std::max(out.boundary_ring_max, std::abs(out.field.at(ix, 0)));
        out.boundary_ring_max = std::max(out.boundary_ring_max, std::abs(out.field.at(0, ix)));
    }
    return out;
}

// sharp interpolation-inequality ratio: 1/2 ||u||_L4^4 * q_mass / (||u||^2 ||grad u||^2);
// at most 1 for true fields, with equality approached by the profile itself
inline double gn_ratio(const Field2D& u, double q_mass) {
    const double l4 = lp_norm(u, 4.0);
    const double l2sq = l2_norm_sq(u);
    const double gsq = grad_norm_sq(u);
    if (l2sq == 0.0 || gsq == 0.0)
        throw std::invalid_argument("gn_ratio: nonzero field with nonzero gradient required");
    return 0.5 * l4 * l4 * l4 * l4 * q_mass / (l2sq * gsq);
}

}  // namespace zlab
