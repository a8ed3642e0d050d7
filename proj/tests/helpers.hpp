#pragma once

#include <random>

#include "zlab/rand_fields.hpp"
#include "zlab/state.hpp"

namespace zlab::testhelp {

// generic admissible state: complex u, real n, real mean-zero nu
inline ZakharovState random_state(const Grid2D& g, std::mt19937_64& rng, double amp = 1.0,
                                  double decay = 3.0) {
    ZakharovState st(g);
    st.u = physical(random_smooth_field(g, rng, decay, amp));
    st.n = physical(random_smooth_field(g, rng, decay, amp, true));
    project_real(st.n);
    Field2D nuh = spectral(random_smooth_field(g, rng, decay, amp, true));
    nuh[0] = 0.0;
    st.nu = physical(nuh);
    project_real(st.nu);
    return st;
}

// focusing gaussian pair preset used by the evolution tests
inline InitialData gaussian_data(double mass_factor) {
    InitialData d;
    d.u_kind = InitialData::UKind::gaussian;
    d.u_sigma = 1.7;
    d.mass_factor = mass_factor;
    d.n_kind = InitialData::NKind::minus_u_sq;
    d.w_kind = InitialData::WKind::zero;
    return d;
}

}  // namespace zlab::testhelp
