#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "zlab/field.hpp"
#include "zlab/multiplier.hpp"

namespace zlab {

// || <xi>^sigma fhat ||_l2 with the grid Parseval weight
inline double sobolev_norm(const Field2D& f, double sigma) {
    Field2D fs = spectral(f);
    const Grid2D& g = fs.grid();
    long double acc = 0;
    for (int ix = 0; ix < g.m; ++ix) {
        const double xx = g.wavenumber(ix);
        for (int iy = 0; iy < g.m; ++iy) {
            const double yy = g.wavenumber(iy);
            acc += std::pow(1.0 + xx * xx + yy * yy, sigma) * std::norm(fs.at(ix, iy));
        }
    }
    return std::sqrt(static_cast<double>(acc) / (g.length * g.length));
}

inline double lp_norm(const Field2D& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    Field2D fp = physical(f);
    long double acc = 0;
    for (std::size_t i = 0; i < fp.size(); ++i) acc += std::pow(std::abs(fp[i]), p);
    const double h = fp.grid().spacing();
    return std::pow(static_cast<double>(acc) * h * h, 1.0 / p);
}

// integral of |f|^p over the periodic ball of radius R about center,
// counting cells whose center lies inside
inline double ball_mass(const Field2D& f, double p, double R,
                        std::array<double, 2> center = {0.0, 0.0}) {
    const Grid2D& g = f.grid();
    if (!(R > 0.0) || R > 0.5 * g.length)
        throw std::invalid_argument("ball_mass: need 0 < R <= L/2");
    Field2D fp = physical(f);
    long double acc = 0;
    for (int ix = 0; ix < g.m; ++ix) {
        const double dx = periodic_delta(g.coord(ix), center[0], g.length);
        for (int iy = 0; iy < g.m; ++iy) {
            const double dy = periodic_delta(g.coord(iy), center[1], g.length);
            if (dx * dx + dy * dy <= R * R) acc += std::pow(std::abs(fp.at(ix, iy)), p);
        }
    }
    const double h = g.spacing();
    return static_cast<double>(acc) * h * h;
}

// distance to the average over the grid's rotation/reflection group,
// normalized by ||f||_L2; 0 for symmetric fields, up to 2 in general
inline double radial_defect(const Field2D& f) {
    Field2D fp = physical(f);
    const Grid2D& g = fp.grid();
    const int m = g.m;
    auto neg = [m](int i) { return (m - i) % m; };
    long double diff = 0, total = 0;
    for (int ix = 0; ix < m; ++ix) {
        for (int iy = 0; iy < m; ++iy) {
            const int nx = neg(ix), ny = neg(iy);
            cplx avg = fp.at(ix, iy) + fp.at(iy, nx) + fp.at(nx, ny) + fp.at(ny, ix)
                     + fp.at(nx, iy) + fp.at(ix, ny) + fp.at(iy, ix) + fp.at(ny, nx);
            avg *= 0.125;
            diff += std::norm(fp.at(ix, iy) - avg);
            total += std::norm(fp.at(ix, iy));
        }
    }
    return total > 0 ? std::sqrt(static_cast<double>(diff / total)) : 0.0;
}

inline double h1_norm_sq(const Field2D& f) {
    Field2D fs = spectral(f);
    const Grid2D& g = fs.grid();
    long double acc = 0;
    for (int ix = 0; ix < g.m; ++ix) {
        const double xx = g.wavenumber(ix);
        for (int iy = 0; iy < g.m; ++iy) {
            const double yy = g.wavenumber(iy);
            acc += (1.0 + xx * xx + yy * yy) * std::norm(fs.at(ix, iy));
        }
    }
    return static_cast<double>(acc) / (g.length * g.length);
}

inline double grad_norm_sq(const Field2D& f) {
    Field2D fs = spectral(f);
    const Grid2D& g = fs.grid();
    long double acc = 0;
    for (int ix = 0; ix < g.m; ++ix) {
        const double xx = g.wavenumber(ix);
        for (int iy = 0; iy < g.m; ++iy) {
            const double yy = g.wavenumber(iy);
            acc += (xx * xx + yy * yy) * std::norm(fs.at(ix, iy));
        }
    }
    return static_cast<double>(acc) / (g.length * g.length);
}

}  // namespace zlab
