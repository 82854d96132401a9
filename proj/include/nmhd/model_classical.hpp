/// @file model_classical.hpp
/// @brief Classical incompressible MHD (velocity + magnetic field)
///
///   du/dt = P[-(u.grad)u + (1/(rho0 mu0)) (curl H) x H + f] + nu Lap u
///   dH/dt = P[-(u.grad)H + (H.grad)u] + mu Lap H
#pragma once

#include "nmhd/model_new.hpp"

namespace nmhd {

struct ClassicalParams {
    double nu = 0.0;
    double mu_resistivity = 0.0;
    double rho0 = 1.0;
    double mu0 = 1.0;

    double lorentz_coefficient() const { return 1.0 / (rho0 * mu0); }

    void validate() const {
        if (!(nu >= 0.0)) throw ArgumentError("nu must be >= 0");
        if (!(mu_resistivity >= 0.0)) throw ArgumentError("mu_resistivity must be >= 0");
        if (!(rho0 > 0.0)) throw ArgumentError("rho0 must be > 0");
        if (!(mu0 > 0.0)) throw ArgumentError("mu0 must be > 0");
    }
};

struct ClassicalState {
    VectorField u;
    VectorField H;
    double t = 0.0;

    static ClassicalState zero(const GridPtr& g) {
        ClassicalState s{VectorField(g), VectorField(g), 0.0};
        s.u.solenoidal_flag = s.H.solenoidal_flag = true;
        return s;
    }
};

inline void add_scaled(ClassicalState& s, const ClassicalState& d, double h) {
    s.u.add_scaled(d.u, h);
    s.H.add_scaled(d.H, h);
    s.t += h * d.t;
}

inline bool all_finite(const ClassicalState& s) { return all_finite(s.u) && all_finite(s.H); }

/// (curl H) x H, unscaled (2D: (curl H) z-hat x H).
inline VectorField magnetic_tension(const VectorField& H, const PhysicalField& H_phys, bool dealias = true) {
    const GridPtr& g = H.grid;
    VectorField out(g);
    const PhysicalField j = pseudo::curl_physical(H);
    if (g->dim() == 3) {
        out = pseudo::cross(g, j, H_phys);
    } else {
        // (0,0,j) x (H1,H2,0) = (-j H2, j H1, 0) = -(H x j z-hat)
        out = pseudo::cross(g, H_phys, j);
        out *= -1.0;
    }
    if (dealias) dealias_inplace(out);
    return out;
}

/// -(u.grad)H + (H.grad)u = d_j(H_j u_i - u_j H_i) for div-free u, H.
inline VectorField induction_term(const GridPtr& g, const PhysicalField& u_phys, const PhysicalField& H_phys,
                                  bool dealias = true) {
    const int dim = g->dim();
    VectorField out(g);
    // M_ij = u_i H_j - H_i u_j is antisymmetric; out_i = d_j M_ij.
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            RealArray m(g->npoints());
            for (std::size_t p = 0; p < m.size(); ++p)
                m[p] = u_phys.comp[i][p] * H_phys.comp[j][p] - H_phys.comp[i][p] * u_phys.comp[j][p];
            const CoeffArray mh = forward(g, m).c;
            const auto &ki = g->kd(i), &kj = g->kd(j);
            for (std::size_t k = 0; k < g->nmodes(); ++k) {
                out.c[i][k] += detail::I * kj[k] * mh[k];
                out.c[j][k] -= detail::I * ki[k] * mh[k];
            }
        }
    if (dealias) dealias_inplace(out);
    return out;
}

inline ClassicalState rhs_classical(const ClassicalState& s, const ClassicalParams& p, const VectorField& f,
                                    const ModelOptions& opt = {}) {
    const GridPtr& g = s.u.grid;
    const PhysicalField up = inverse(s.u);
    const PhysicalField hp = inverse(s.H);

    ClassicalState d;
    d.t = 1.0;
    d.u = VectorField(g);
    if (opt.advection) d.u.add_scaled(advection_term(s.u, up, opt.dealias), -1.0);
    d.u.add_scaled(magnetic_tension(s.H, hp, opt.dealias), p.lorentz_coefficient());
    if (f.grid) d.u += opt.dealias ? dealias(f) : f;
    leray_project_inplace(d.u);
    d.u.add_scaled(laplacian(s.u), p.nu);

    d.H = induction_term(g, up, hp, opt.dealias);
    leray_project_inplace(d.H);
    d.H.add_scaled(laplacian(s.H), p.mu_resistivity);
    return d;
}

struct ClassicalSystem {
    ClassicalParams params;
    VectorField f;
    ModelOptions options;

    using State = ClassicalState;
    State rhs(const State& s) const { return rhs_classical(s, params, f, options); }
};

}  // namespace nmhd
