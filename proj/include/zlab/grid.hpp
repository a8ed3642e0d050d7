#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace zlab {

// Uniform M x M grid on the torus [-L/2, L/2)^2, row-major storage.
// Mode index for storage slot i is i (i < M/2) or i - M, so wavenumbers
// run over 2*pi*k/L with k in [-M/2, M/2).
struct Grid2D {
    int m = 0;
    double length = 0.0;

    Grid2D() = default;
    Grid2D(int points, double side) : m(points), length(side) {
        if (m <= 0 || m % 2 != 0)
            throw std::invalid_argument("Grid2D: point count must be positive and even");
        if (!(length > 0.0))
            throw std::invalid_argument("Grid2D: side length must be positive");
    }

    double spacing() const { return length / m; }
    std::size_t size() const { return static_cast<std::size_t>(m) * m; }
    std::size_t at(int ix, int iy) const { return static_cast<std::size_t>(ix) * m + iy; }

    double coord(int i) const { return -0.5 * length + spacing() * i; }
    int mode(int i) const { return i < m / 2 ? i : i - m; }
    double wavenumber(int i) const { return 2.0 * M_PI * mode(i) / length; }
    // largest representable |xi| per axis
    double xi_max() const { return M_PI / spacing(); }
    // per-axis mode-index cutoff of the 2/3 dealias rule
    int dealias_cut() const { return m / 3; }

    bool operator==(const Grid2D& o) const { return m == o.m && length == o.length; }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

// shortest signed displacement a-b on a period-L circle
inline double periodic_delta(double a, double b, double period) {
    double d = a - b;
    d -= period * std::round(d / period);
    return d;
}

}  // namespace zlab
