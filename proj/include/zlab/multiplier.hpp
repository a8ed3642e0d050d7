#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "zlab/field.hpp"

namespace zlab {

// Low-pass smoothing symbol: 1 on |xi| <= N, (|xi|/N)^(s-1) on |xi| >= 3N,
// joined on (N, 3N) by ramping the exponent with the cubic smoothstep
// S(x) = 3x^2 - 2x^3, which makes the symbol C^1 and monotone nonincreasing.
inline double imethod_symbol(double absxi, double N, double s) {
    if (!(N > 0.0)) throw std::invalid_argument("imethod_symbol: N must be positive");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("imethod_symbol: s must lie in (0,1)");
    const double rho = absxi / N;
    if (rho <= 1.0) return 1.0;
    if (rho >= 3.0) return std::pow(rho, s - 1.0);
    const double x = 0.5 * (rho - 1.0);
    const double ramp = x * x * (3.0 - 2.0 * x);
    return std::pow(rho, (s - 1.0) * ramp);
}

struct MultiplierSpec {
    enum class Kind {
        imethod,         // m_N as above, needs N and s
        lambda,          // |xi|
        inv_lambda,      // 1/|xi|, zero mode needs a policy
        bessel_pow,      // <xi>^sigma = (1+|xi|^2)^(sigma/2)
        laplacian,       // -|xi|^2
        gradient,        // i xi_axis, axis in {0,1}
        dyadic           // indicator of 2^j <= <xi> < 2^(j+1)
    };

    Kind kind = Kind::bessel_pow;
    double n = 1.0;      // smoothing cutoff
    double s = 1.0;      // smoothing regularity
    double sigma = 0.0;  // bessel power
    int axis = 0;        // gradient component
    int j = 0;           // dyadic shell index

    static MultiplierSpec imethod(double n, double s) {
        MultiplierSpec sp; sp.kind = Kind::imethod; sp.n = n; sp.s = s; return sp;
    }
    static MultiplierSpec lambda() { MultiplierSpec sp; sp.kind = Kind::lambda; return sp; }
    static MultiplierSpec inv_lambda() { MultiplierSpec sp; sp.kind = Kind::inv_lambda; return sp; }
    static MultiplierSpec bessel_pow(double sigma) {
        MultiplierSpec sp; sp.kind = Kind::bessel_pow; sp.sigma = sigma; return sp;
    }
    static MultiplierSpec laplacian() { MultiplierSpec sp; sp.kind = Kind::laplacian; return sp; }
    static MultiplierSpec gradient(int axis) {
        if (axis != 0 && axis != 1) throw std::invalid_argument("gradient axis must be 0 or 1");
        MultiplierSpec sp; sp.kind = Kind::gradient; sp.axis = axis; return sp;
    }
    static MultiplierSpec dyadic(int j) {
        if (j < 0) throw std::invalid_argument("dyadic shell index must be >= 0");
        MultiplierSpec sp; sp.kind = Kind::dyadic; sp.j = j; return sp;
    }
};

inline cplx symbol_value(const MultiplierSpec& sp, double xix, double xiy) {
    const double a2 = xix * xix + xiy * xiy;
    switch (sp.kind) {
        case MultiplierSpec::Kind::imethod:
            return imethod_symbol(std::sqrt(a2), sp.n, sp.s);
        case MultiplierSpec::Kind::lambda:
            return std::sqrt(a2);
        case MultiplierSpec::Kind::inv_lambda:
            return a2 > 0.0 ? 1.0 / std::sqrt(a2) : 0.0;
        case MultiplierSpec::Kind::bessel_pow:
            return std::pow(1.0 + a2, 0.5 * sp.sigma);
        case MultiplierSpec::Kind::laplacian:
            return -a2;
        case MultiplierSpec::Kind::gradient:
            return cplx(0.0, sp.axis == 0 ? xix : xiy);
        case MultiplierSpec::Kind::dyadic: {
            const double br = std::sqrt(1.0 + a2);
            const double lo = std::ldexp(1.0, sp.j), hi = 2.0 * lo;
            return (br >= lo && br < hi) ? 1.0 : 0.0;
        }
    }
    return 0.0;
}

enum class ZeroModePolicy { reject, drop };

// Apply a Fourier multiplier; output keeps the input representation.
// inv_lambda refuses fields carrying zero-mode mass unless told to drop it.
inline Field2D apply_multiplier(const Field2D& f, const MultiplierSpec& sp,
                                ZeroModePolicy zp = ZeroModePolicy::reject) {
    const bool was_physical = (f.repr() == Repr::physical);
    Field2D out = spectral(f);
    const Grid2D& g = out.grid();

    if (sp.kind == MultiplierSpec::Kind::inv_lambda && zp == ZeroModePolicy::reject) {
        const double zero_mass = std::abs(out[0]) / g.length;  // L2 weight of the zero mode
        const double total = l2_norm(out);
        if (zero_mass > 1e-12 * std::max(total, 1e-300)) {
            std::ostringstream msg;
            msg << "apply_multiplier: inv_lambda on field with zero-mode mass "
                << zero_mass << " (L2 norm " << total << "); drop policy required";
            throw std::invalid_argument(msg.str());
        }
    }

    for (int ix = 0; ix < g.m; ++ix) {
        const double xix = g.wavenumber(ix);
        for (int iy = 0; iy < g.m; ++iy)
            out.at(ix, iy) *= symbol_value(sp, xix, g.wavenumber(iy));
    }
    if (was_physical) out.to_physical();
    return out;
}

// 2/3-rule truncation: zero every mode with a per-axis index above M/3.
inline void dealias(Field2D& f) {
    const bool was_physical = (f.repr() == Repr::physical);
    f.to_spectral();
    const Grid2D& g = f.grid();
    const int cut = g.dealias_cut();
    for (int ix = 0; ix < g.m; ++ix) {
        const bool kill_row = std::abs(g.mode(ix)) > cut;
        for (int iy = 0; iy < g.m; ++iy)
            if (kill_row || std::abs(g.mode(iy)) > cut) f.at(ix, iy) = 0.0;
    }
    if (was_physical) f.to_physical();
}

// fraction of squared L2 mass at per-axis mode index above M/3
inline double tail_fraction(const Field2D& f) {
    Field2D fs = spectral(f);
    const Grid2D& g = fs.grid();
    const int cut = g.dealias_cut();
    long double outer = 0, total = 0;
    for (int ix = 0; ix < g.m; ++ix) {
        const bool row_out = std::abs(g.mode(ix)) > cut;
        for (int iy = 0; iy < g.m; ++iy) {
            const double v = std::norm(fs.at(ix, iy));
            total += v;
            if (row_out || std::abs(g.mode(iy)) > cut) outer += v;
        }
    }
    return total > 0 ? static_cast<double>(outer / total) : 0.0;
}

}  // namespace zlab
