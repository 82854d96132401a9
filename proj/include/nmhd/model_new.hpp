/// @file model_new.hpp
/// @brief Right-hand side of the velocity / vector-potential system
///
///   du/dt  = P[-(u.grad)u + (rho_e/rho0) u x curl A + f] + nu Lap u
///   dA/dt  = W
///   dW/dt  = P[(1/(eps0 mu0)) Lap A + (rho_e/eps0) u + g_A]
///
/// with div u = div A = 0. The pressure p and the magnetic pressure Phi are
/// the gradient parts removed by P; both can be recovered afterwards.
#pragma once

#include <functional>
#include <optional>

#include "nmhd/pseudo.hpp"

namespace nmhd {

struct PhysParams {
    double nu = 0.0;
    double rho0 = 1.0;
    double rho_e = 0.0;
    double eps0 = 1.0;
    double mu0 = 1.0;

    /// c^2 = 1/(eps0 mu0)
    double wave_speed_sq() const { return 1.0 / (eps0 * mu0); }
    double wave_speed() const { return std::sqrt(wave_speed_sq()); }

    void validate() const {
        if (!(nu >= 0.0)) throw ArgumentError("nu must be >= 0");
        if (!(rho0 > 0.0)) throw ArgumentError("rho0 must be > 0");
        if (!(eps0 > 0.0)) throw ArgumentError("eps0 must be > 0");
        if (!(mu0 > 0.0)) throw ArgumentError("mu0 must be > 0");
        if (!std::isfinite(rho_e)) throw ArgumentError("rho_e must be finite");
        if (!std::isfinite(wave_speed()) || !(wave_speed() > 0.0)) throw ArgumentError("wave speed not finite");
    }
};

struct NewMHDState {
    VectorField u;
    VectorField A;
    VectorField W;  ///< dA/dt
    double t = 0.0;

    static NewMHDState zero(const GridPtr& g) {
        NewMHDState s{VectorField(g), VectorField(g), VectorField(g), 0.0};
        s.u.solenoidal_flag = s.A.solenoidal_flag = s.W.solenoidal_flag = true;
        return s;
    }
};

inline void add_scaled(NewMHDState& s, const NewMHDState& d, double h) {
    s.u.add_scaled(d.u, h);
    s.A.add_scaled(d.A, h);
    s.W.add_scaled(d.W, h);
    s.t += h * d.t;
}

inline bool all_finite(const NewMHDState& s) { return all_finite(s.u) && all_finite(s.A) && all_finite(s.W); }

/// External sources. Empty fields mean zero. `source`, when set, adds
/// time-dependent contributions (manufactured-solution testing only).
struct Forcing {
    VectorField f;
    VectorField g_A;
    std::function<void(double t, VectorField& f, VectorField& g_A)> source;

    bool has_static() const { return f.grid != nullptr; }

    /// Momentum and potential sources at time t on grid g.
    std::pair<VectorField, VectorField> at(const GridPtr& g, double t) const {
        VectorField ff = f.grid ? f : VectorField(g);
        VectorField gg = g_A.grid ? g_A : VectorField(g);
        if (source) source(t, ff, gg);
        return {std::move(ff), std::move(gg)};
    }
};

struct ModelOptions {
    bool dealias = true;
    bool advection = true;
};

/// (u.grad)u pseudo-spectrally, conservative form d_j(u_j u_i), 2/3-rule
/// truncated when `dealias` is set.
inline VectorField advection_term(const VectorField& u, const PhysicalField& u_phys, bool dealias = true) {
    VectorField n = pseudo::divergence_of_outer(u.grid, u_phys, u_phys, true);
    if (dealias) dealias_inplace(n);
    return n;
}

inline VectorField advection_term(const VectorField& u, bool dealias = true) {
    return advection_term(u, inverse(u), dealias);
}

/// (rho_e/rho0) u x curl A (2D: u x (curl A) z-hat).
inline VectorField lorentz_term(const PhysicalField& u_phys, const VectorField& A, const PhysParams& p,
                                bool dealias = true) {
    VectorField out = pseudo::cross(A.grid, u_phys, pseudo::curl_physical(A));
    out *= p.rho_e / p.rho0;
    if (dealias) dealias_inplace(out);
    return out;
}

inline VectorField lorentz_term(const VectorField& u, const VectorField& A, const PhysParams& p,
                                bool dealias = true) {
    if (p.rho_e == 0.0) return VectorField(u.grid);
    return lorentz_term(inverse(u), A, p, dealias);
}

namespace detail {
/// -(u.grad)u + lorentz + f, before projection.
inline VectorField momentum_bracket(const NewMHDState& s, const PhysParams& p, const VectorField& f,
                                    const ModelOptions& opt) {
    const GridPtr& g = s.u.grid;
    VectorField b(g);
    const bool need_u = opt.advection || p.rho_e != 0.0;
    if (need_u) {
        const PhysicalField up = inverse(s.u);
        if (opt.advection) b.add_scaled(advection_term(s.u, up, opt.dealias), -1.0);
        if (p.rho_e != 0.0) b += lorentz_term(up, s.A, p, opt.dealias);
    }
    VectorField ff = f;
    if (opt.dealias) dealias_inplace(ff);
    b += ff;
    return b;
}
}  // namespace detail

/// Time derivative of the state; the returned t component is 1.
inline NewMHDState rhs(const NewMHDState& s, const PhysParams& p, const Forcing& forcing,
                       const ModelOptions& opt = {}) {
    const GridPtr& g = s.u.grid;
    auto [f, gA] = forcing.at(g, s.t);

    NewMHDState d;
    d.t = 1.0;
    d.u = detail::momentum_bracket(s, p, f, opt);
    leray_project_inplace(d.u);
    d.u.add_scaled(laplacian(s.u), p.nu);
    d.u.solenoidal_flag = true;

    d.A = s.W;

    d.W = laplacian(s.A);
    d.W *= p.wave_speed_sq();
    d.W.add_scaled(s.u, p.rho_e / p.eps0);
    if (opt.dealias) dealias_inplace(gA);
    d.W += gA;
    leray_project_inplace(d.W);
    return d;
}

/// (I - P)[(1/(eps0 mu0)) Lap A + (rho_e/eps0) u]: the grad Phi that the
/// projection removes. Zero for solenoidal states.
inline VectorField recover_phi_gradient(const NewMHDState& s, const PhysParams& p) {
    VectorField v = laplacian(s.A);
    v *= p.wave_speed_sq();
    v.add_scaled(s.u, p.rho_e / p.eps0);
    return gradient_part(v);
}

/// Pressure from -|k|^2 p = rho0 (ik).[-(u.grad)u + lorentz + f], mean-free.
inline ScalarField recover_pressure(const NewMHDState& s, const PhysParams& p, const Forcing& forcing,
                                    const ModelOptions& opt = {}) {
    auto [f, gA] = forcing.at(s.u.grid, s.t);
    const VectorField b = detail::momentum_bracket(s, p, f, opt);
    const auto& g = *s.u.grid;
    ScalarField out(s.u.grid);
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        const double kk = g.kdsq(i);
        if (kk == 0.0) continue;
        cplx div{};
        for (int d = 0; d < g.dim(); ++d) div += detail::I * g.kd(d, i) * b.c[d][i];
        out.c[i] = -p.rho0 * div / kk;
    }
    return out;
}

/// The model as a system for the generic integrators.
struct NewMHDSystem {
    PhysParams params;
    Forcing forcing;
    ModelOptions options;

    using State = NewMHDState;
    State rhs(const State& s) const { return nmhd::rhs(s, params, forcing, options); }
};

}  // namespace nmhd
