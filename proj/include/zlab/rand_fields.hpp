#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

#include "zlab/field.hpp"

namespace zlab {

namespace detail {

// uniform in (0,1), built from the raw engine words so realizations do not
// depend on the standard library's distribution internals
inline double unit_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

inline std::array<double, 2> normal_pair(std::mt19937_64& rng) {
    const double r = std::sqrt(-2.0 * std::log(unit_uniform(rng)));
    const double th = 2.0 * std::numbers::pi_v<double> * unit_uniform(rng);
    return {r * std::cos(th), r * std::sin(th)};
}

// f_hat <- (f_hat + conj(mirror)) / 2, making the physical field real
inline void symmetrize_spectrum(Field2D& f) {
    const Grid2D& g = f.grid();
    const int m = g.m;
    for (int ix = 0; ix < m; ++ix) {
        for (int iy = 0; iy < m; ++iy) {
            const std::size_t idx = g.at(ix, iy);
            const std::size_t mir = g.at((m - ix) % m, (m - iy) % m);
            if (mir < idx) continue;
            const cplx sym = 0.5 * (f[idx] + std::conj(f[mir]));
            f[idx] = sym;
            f[mir] = std::conj(sym);
        }
    }
}

}  // namespace detail

// complex Gaussian coefficients shaped by (1+|xi|^2)^(-decay/2), scaled to the
// requested L^2 norm; real_valued symmetrizes the spectrum first
inline Field2D random_smooth_field(const Grid2D& g, std::mt19937_64& rng, double decay = 3.0,
                                   double l2_target = 1.0, bool real_valued = false) {
    Field2D f(g, Repr::spectral);
    for (int ix = 0; ix < g.m; ++ix) {
        for (int iy = 0; iy < g.m; ++iy) {
            const double xx = g.wavenumber(ix), yy = g.wavenumber(iy);
            const auto z = detail::normal_pair(rng);
            const double env = std::pow(1.0 + xx * xx + yy * yy, -0.5 * decay);
            f.at(ix, iy) = env * cplx(z[0], z[1]);
        }
    }
    if (real_valued) detail::symmetrize_spectrum(f);
    const double nrm = l2_norm(f);
    if (nrm == 0.0) throw std::runtime_error("random_smooth_field: degenerate draw");
    f *= l2_target / nrm;
    return f;
}

// coefficients supported on k_lo <= |xi| <= k_hi with a |xi|^power profile
inline Field2D random_band_field(const Grid2D& g, std::mt19937_64& rng, double k_lo, double k_hi,
                                 double power, double l2_target, bool real_valued) {
    if (!(0.0 < k_lo && k_lo < k_hi))
        throw std::invalid_argument("random_band_field: need 0 < k_lo < k_hi");
    Field2D f(g, Repr::spectral);
    bool any = false;
    for (int ix = 0; ix < g.m; ++ix) {
        for (int iy = 0; iy < g.m; ++iy) {
            const double xx = g.wavenumber(ix), yy = g.wavenumber(iy);
            const double k = std::hypot(xx, yy);
            if (k < k_lo || k > k_hi) {
                f.at(ix, iy) = 0.0;
                continue;
            }
            any = true;
            const auto z = detail::normal_pair(rng);
            f.at(ix, iy) = std::pow(k, power) * cplx(z[0], z[1]);
        }
    }
    if (!any) throw std::invalid_argument("random_band_field: band holds no grid modes");
    if (real_valued) detail::symmetrize_spectrum(f);
    const double nrm = l2_norm(f);
    if (nrm == 0.0) throw std::runtime_error("random_band_field: degenerate draw");
    f *= l2_target / nrm;
    return f;
}

// deterministic radial coefficients g(|xi|) = exp(-(|xi|-k0)^2 / (2 width^2));
// exactly symmetric under the grid's reflections
inline Field2D radial_shell_field(const Grid2D& g, double k0, double width, double l2_target) {
    if (!(width > 0.0)) throw std::invalid_argument("radial_shell_field: need width > 0");
    Field2D f = make_spectral(g, [&](double xx, double yy) {
        const double k = std::hypot(xx, yy);
        const double d = (k - k0) / width;
        return cplx(std::exp(-0.5 * d * d), 0.0);
    });
    f *= l2_target / l2_norm(f);
    return f;
}

// L^2-normalized Gaussian envelope around `center` with the carrier snapped to
// the wavenumber lattice so the sample is exactly periodic
inline Field2D gaussian_packet(const Grid2D& g, std::array<double, 2> center, double sigma,
                               std::array<double, 2> carrier) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_packet: need sigma > 0");
    const double step = 2.0 * std::numbers::pi_v<double> / g.length;
    const double kx = step * std::round(carrier[0] / step);
    const double ky = step * std::round(carrier[1] / step);
    Field2D f = make_physical(g, [&](double x, double y) {
        const double dx = periodic_delta(x, center[0], g.length);
        const double dy = periodic_delta(y, center[1], g.length);
        const double env = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        const double ph = kx * x + ky * y;
        return env * cplx(std::cos(ph), std::sin(ph));
    });
    f *= 1.0 / l2_norm(f);
    return f;
}

}  // namespace zlab
