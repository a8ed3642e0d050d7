#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "zlab/field.hpp"
#include "zlab/groundstate.hpp"
#include "zlab/multiplier.hpp"
#include "zlab/norms.hpp"

namespace zlab {

// Coupled Schrodinger-wave state (u, n, nu) at time t.  n is the density
// deviation, nu its half-wave companion (nu = inverse-Lambda of n_t), kept as
// a separate real mean-zero field so the complex pair n +- i*nu never has to
// be stored and stays exactly conjugate-symmetric.
struct ZakharovState {
    double t = 0.0;
    Field2D u, n, nu;

    ZakharovState() = default;
    explicit ZakharovState(const Grid2D& g)
        : u(g, Repr::physical), n(g, Repr::physical), nu(g, Repr::physical) {}

    const Grid2D& grid() const { return u.grid(); }
};

inline void check_real_components(const ZakharovState& st, double tol = 1e-10) {
    if (imag_fraction(physical(st.n)) > tol || imag_fraction(physical(st.nu)) > tol)
        throw std::invalid_argument("ZakharovState: n and nu must be real-valued");
}

// n_plus = n + i nu, n_minus = n - i nu
inline std::pair<Field2D, Field2D> split_components(const Field2D& n, const Field2D& nu) {
    if (n.grid() != nu.grid())
        throw std::invalid_argument("split_components: grid mismatch");
    Field2D np = physical(n), nm = physical(n);
    Field2D nup = physical(nu);
    if (imag_fraction(np) > 1e-10 || imag_fraction(nup) > 1e-10)
        throw std::invalid_argument("split_components: inputs must be real-valued");
    for (std::size_t i = 0; i < np.size(); ++i) {
        const double a = np[i].real(), b = nup[i].real();
        np[i] = cplx(a, b);
        nm[i] = cplx(a, -b);
    }
    return {std::move(np), std::move(nm)};
}

inline std::pair<Field2D, Field2D> recombine(const Field2D& n_plus, const Field2D& n_minus) {
    if (n_plus.grid() != n_minus.grid())
        throw std::invalid_argument("recombine: grid mismatch");
    Field2D np = physical(n_plus), nm = physical(n_minus);
    Field2D n = np, nu = np;
    double scale = 0.0, defect = 0.0;
    for (std::size_t i = 0; i < np.size(); ++i) {
        defect = std::max(defect, std::abs(np[i] - std::conj(nm[i])));
        scale = std::max(scale, std::abs(np[i]));
        n[i] = cplx(0.5 * (np[i] + nm[i]).real(), 0.0);
        nu[i] = cplx(0.5 * (np[i] - nm[i]).imag(), 0.0);
    }
    if (defect > 1e-10 * std::max(scale, 1e-300))
        throw std::invalid_argument("recombine: n_plus and n_minus are not conjugates");
    return {std::move(n), std::move(nu)};
}

inline Field2D n_plus_field(const ZakharovState& st) {
    return split_components(st.n, st.nu).first;
}

// Initial data builder.  u comes from a named preset, the density pair from
// (n0, w0) with nu0 = Lambda w0, which makes nu mean-zero by construction.
struct InitialData {
    enum class UKind { zero, gaussian, townes_scaled, custom };
    enum class NKind { zero, gaussian, minus_u_sq, custom };
    enum class WKind { zero, gaussian, custom };

    UKind u_kind = UKind::gaussian;
    double u_amplitude = 1.0;  // gaussian prefactor A
    double u_sigma = 1.0;      // gaussian width
    double mu = 1.0;           // townes_scaled spatial scale
    double mass_ratio = 1.0;   // townes_scaled: ||u0||^2 = mass_ratio * ||Q||^2
    double mass_factor = 0.0;  // if > 0, rescale u0 so ||u0||^2 = mass_factor * ||Q||^2
    std::string u_file;

    NKind n_kind = NKind::minus_u_sq;
    double n_amplitude = 1.0;
    double n_sigma = 1.0;
    std::string n_file;

    WKind w_kind = WKind::zero;
    double w_amplitude = 1.0;
    double w_sigma = 1.0;
    std::string w_file;

    bool radial_required = true;
    unsigned long long seed = 1;
};

// externally loaded fields for the file-backed presets
struct LoadedFields {
    const Field2D* u = nullptr;
    const Field2D* n = nullptr;
    const Field2D* w = nullptr;
};

namespace detail {

inline Field2D centered_gaussian(const Grid2D& g, double amp, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("initial data: gaussian width must be positive");
    return make_physical(g, [&](double x, double y) {
        return amp * std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
    });
}

}  // namespace detail

// File loading itself lives in the io layer; pre-loaded fields arrive through
// `loaded`.  profile may be null when no preset needs it.
inline ZakharovState build_initial_state(const InitialData& d, const Grid2D& g,
                                         const RadialProfile* profile,
                                         const LoadedFields& loaded = {}) {
    ZakharovState st(g);
    const bool needs_q = d.u_kind == InitialData::UKind::townes_scaled || d.mass_factor > 0.0;
    if (needs_q && profile == nullptr)
        throw std::invalid_argument("build_initial_state: preset needs the ground-state profile");

    switch (d.u_kind) {
        case InitialData::UKind::zero:
            break;
        case InitialData::UKind::gaussian:
            st.u = detail::centered_gaussian(g, d.u_amplitude, d.u_sigma);
            break;
        case InitialData::UKind::townes_scaled: {
            st.u = project_to_grid(*profile, g, d.mu).field;
            const double m = l2_norm_sq(st.u);
            if (m > 0.0) st.u *= std::sqrt(d.mass_ratio * profile->mass / m);
            break;
        }
        case InitialData::UKind::custom:
            if (!loaded.u)
                throw std::invalid_argument("build_initial_state: custom u field not supplied");
            if (loaded.u->grid() != g)
                throw std::invalid_argument("build_initial_state: loaded u grid mismatch");
            st.u = physical(*loaded.u);
            break;
    }
    if (d.mass_factor > 0.0) {
        const double m = l2_norm_sq(st.u);
        if (m == 0.0) throw std::invalid_argument("build_initial_state: cannot mass-normalize zero u");
        st.u *= std::sqrt(d.mass_factor * profile->mass / m);
    }

    switch (d.n_kind) {
        case InitialData::NKind::zero:
            break;
        case InitialData::NKind::gaussian:
            st.n = detail::centered_gaussian(g, d.n_amplitude, d.n_sigma);
            break;
        case InitialData::NKind::minus_u_sq:
            st.n = st.u;
            for (std::size_t i = 0; i < st.n.size(); ++i) st.n[i] = -std::norm(st.n[i]);
            break;
        case InitialData::NKind::custom:
            if (!loaded.n)
                throw std::invalid_argument("build_initial_state: custom n field not supplied");
            if (loaded.n->grid() != g)
                throw std::invalid_argument("build_initial_state: loaded n grid mismatch");
            st.n = physical(*loaded.n);
            project_real(st.n);
            break;
    }

    switch (d.w_kind) {
        case InitialData::WKind::zero:
            break;
        case InitialData::WKind::gaussian: {
            Field2D w = detail::centered_gaussian(g, d.w_amplitude, d.w_sigma);
            st.nu = apply_multiplier(w, MultiplierSpec::lambda());
            break;
        }
        case InitialData::WKind::custom: {
            if (!loaded.w)
                throw std::invalid_argument("build_initial_state: custom w field not supplied");
            if (loaded.w->grid() != g)
                throw std::invalid_argument("build_initial_state: loaded w grid mismatch");
            Field2D w = physical(*loaded.w);
            project_real(w);
            st.nu = apply_multiplier(w, MultiplierSpec::lambda());
            break;
        }
    }
    project_real(st.nu);
    // Lambda annihilates the mean, but pin the zero mode against roundoff
    {
        Field2D s = spectral(st.nu);
        s[0] = 0.0;
        st.nu = physical(std::move(s));
        project_real(st.nu);
    }

    if (d.radial_required) {
        for (const Field2D* f : {&st.u, &st.n, &st.nu}) {
            if (l2_norm_sq(*f) == 0.0) continue;
            if (radial_defect(*f) > 1e-8)
                throw std::invalid_argument(
                    "build_initial_state: radial data required but a component is asymmetric");
        }
    }
    return st;
}

}  // namespace zlab
