#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zlab/fft.hpp"
#include "zlab/grid.hpp"

namespace zlab {

using cplx = std::complex<double>;

enum class Repr { physical, spectral };

// Scalar field on a Grid2D, either as samples f(x_j) or as Fourier
// coefficients fhat(xi_k) = h^2 sum_j f(x_j) exp(-i xi_k x_j).  With that
// normalization Parseval reads  h^2 sum|f|^2 = L^-2 sum|fhat|^2.
class Field2D {
  public:
    Field2D() = default;
    Field2D(const Grid2D& g, Repr r) : grid_(g), repr_(r), data_(g.size()) {}

    const Grid2D& grid() const { return grid_; }
    Repr repr() const { return repr_; }
    std::size_t size() const { return data_.size(); }

    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }
    cplx& at(int ix, int iy) { return data_[grid_.at(ix, iy)]; }
    const cplx& at(int ix, int iy) const { return data_[grid_.at(ix, iy)]; }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    Field2D& to_spectral() {
        if (repr_ == Repr::spectral) return *this;
        detail::FftPlans::of(grid_.m).forward(data_.data());
        const double h2 = grid_.spacing() * grid_.spacing();
        scale_checkerboard(h2);
        repr_ = Repr::spectral;
        return *this;
    }

    Field2D& to_physical() {
        if (repr_ == Repr::physical) return *this;
        const double inv = 1.0 / (grid_.length * grid_.length);
        scale_checkerboard(inv);
        detail::FftPlans::of(grid_.m).backward(data_.data());
        repr_ = Repr::physical;
        return *this;
    }

    Field2D& operator+=(const Field2D& o) { return zip(o, [](cplx& a, cplx b) { a += b; }); }
    Field2D& operator-=(const Field2D& o) { return zip(o, [](cplx& a, cplx b) { a -= b; }); }
    Field2D& operator*=(cplx c) {
        for (auto& v : data_) v *= c;
        return *this;
    }

  private:
    // multiply entry (ix,iy) by s * (-1)^(ix+iy); the alternating sign moves the
    // origin of the transform to the box center x = (-L/2 + j h)
    void scale_checkerboard(double s) {
        const int m = grid_.m;
        for (int ix = 0; ix < m; ++ix) {
            double row = (ix % 2 == 0) ? s : -s;
            cplx* p = data_.data() + grid_.at(ix, 0);
            for (int iy = 0; iy < m; ++iy) p[iy] *= (iy % 2 == 0) ? row : -row;
        }
    }

    template <class F>
    Field2D& zip(const Field2D& o, F&& f) {
        require_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) f(data_[i], o.data_[i]);
        return *this;
    }

    void require_same(const Field2D& o) const {
        if (grid_ != o.grid_ || repr_ != o.repr_)
            throw std::invalid_argument("Field2D: grid/representation mismatch");
    }

    Grid2D grid_;
    Repr repr_ = Repr::physical;
    std::vector<cplx> data_;
};

inline Field2D spectral(Field2D f) { return std::move(f.to_spectral()); }
inline Field2D physical(Field2D f) { return std::move(f.to_physical()); }

// build from a sample function of (x, y)
template <class F>
Field2D make_physical(const Grid2D& g, F&& f) {
    Field2D out(g, Repr::physical);
    for (int ix = 0; ix < g.m; ++ix)
        for (int iy = 0; iy < g.m; ++iy) out.at(ix, iy) = f(g.coord(ix), g.coord(iy));
    return out;
}

// build from a coefficient function of (xi_x, xi_y)
template <class F>
Field2D make_spectral(const Grid2D& g, F&& f) {
    Field2D out(g, Repr::spectral);
    for (int ix = 0; ix < g.m; ++ix)
        for (int iy = 0; iy < g.m; ++iy) out.at(ix, iy) = f(g.wavenumber(ix), g.wavenumber(iy));
    return out;
}

inline double integrate_real(const Field2D& f) {
    if (f.repr() != Repr::physical)
        throw std::invalid_argument("integrate_real: physical representation required");
    long double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i].real();
    const double h = f.grid().spacing();
    return static_cast<double>(acc) * h * h;
}

inline cplx integrate(const Field2D& f) {
    if (f.repr() != Repr::physical)
        throw std::invalid_argument("integrate: physical representation required");
    long double re = 0, im = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        re += f[i].real();
        im += f[i].imag();
    }
    const double h = f.grid().spacing();
    return {static_cast<double>(re) * h * h, static_cast<double>(im) * h * h};
}

// integral of conj(a) * b, both physical
inline cplx inner(const Field2D& a, const Field2D& b) {
    if (a.grid() != b.grid() || a.repr() != Repr::physical || b.repr() != Repr::physical)
        throw std::invalid_argument("inner: matching physical fields required");
    long double re = 0, im = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cplx v = std::conj(a[i]) * b[i];
        re += v.real();
        im += v.imag();
    }
    const double h = a.grid().spacing();
    return {static_cast<double>(re) * h * h, static_cast<double>(im) * h * h};
}

// squared L2 norm, valid in either representation
inline double l2_norm_sq(const Field2D& f) {
    long double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += std::norm(f[i]);
    const double h = f.grid().spacing();
    const double w = (f.repr() == Repr::physical)
                         ? h * h
                         : 1.0 / (f.grid().length * f.grid().length);
    return static_cast<double>(acc) * w;
}

inline double l2_norm(const Field2D& f) { return std::sqrt(l2_norm_sq(f)); }

// pointwise product of physical fields
inline Field2D pointwise(const Field2D& a, const Field2D& b) {
    if (a.grid() != b.grid() || a.repr() != Repr::physical || b.repr() != Repr::physical)
        throw std::invalid_argument("pointwise: matching physical fields required");
    Field2D out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

inline Field2D conj(Field2D f) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::conj(f[i]);
    return f;
}

inline double max_abs(const Field2D& f) {
    double m = 0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

// largest |Im| relative to the field scale; project_real zeroes Im exactly
inline double imag_fraction(const Field2D& f) {
    double mi = 0, ma = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        mi = std::max(mi, std::abs(f[i].imag()));
        ma = std::max(ma, std::abs(f[i]));
    }
    return ma > 0 ? mi / ma : 0.0;
}

inline void project_real(Field2D& f) {
    if (f.repr() != Repr::physical)
        throw std::invalid_argument("project_real: physical representation required");
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = cplx(f[i].real(), 0.0);
}

}  // namespace zlab
