/// @file timestep.hpp
/// @brief Explicit RK4 integration and the stability-limited step size.
#pragma once

#include <limits>
#include <string>

#include "nmhd/model_classical.hpp"

namespace nmhd {

enum class StepMode { fixed, automatic };

struct StepControl {
    double dt = 1e-3;
    double cfl_safety = 0.4;
    StepMode mode = StepMode::fixed;

    void validate() const {
        if (!(dt > 0.0)) throw ArgumentError("dt must be > 0");
        if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ArgumentError("cfl_safety must lie in (0, 1]");
    }
};

/// Classical fourth-order Runge-Kutta step of any system exposing
/// `State rhs(const State&) const`. Derivatives carry t = 1, so stage times
/// advance with the stage weights.
template <class System, class State = typename System::State>
State rk4_step(const System& sys, const State& s, double dt) {
    if (!(dt > 0.0)) throw ArgumentError("dt must be > 0");
    const State k1 = sys.rhs(s);
    State tmp = s;
    add_scaled(tmp, k1, 0.5 * dt);
    const State k2 = sys.rhs(tmp);
    tmp = s;
    add_scaled(tmp, k2, 0.5 * dt);
    const State k3 = sys.rhs(tmp);
    tmp = s;
    add_scaled(tmp, k3, dt);
    const State k4 = sys.rhs(tmp);

    State out = s;
    add_scaled(out, k1, dt / 6.0);
    add_scaled(out, k2, dt / 3.0);
    add_scaled(out, k3, dt / 3.0);
    add_scaled(out, k4, dt / 6.0);
    out.t = s.t + dt;
    if (!all_finite(out)) throw BlowUpError(out.t, "non-finite coefficient after RK4 step");
    return out;
}

/// Wraps a system so every derivative is multiplied by a mode mask: the
/// evolution then stays in the span of the retained modes.
template <class System>
struct MaskedSystem {
    System inner;
    ModeMask mask;

    using State = typename System::State;
    State rhs(const State& s) const {
        State d = inner.rhs(s);
        apply_state_mask(d, mask);
        return d;
    }
};

inline void apply_state_mask(NewMHDState& s, const ModeMask& m) {
    apply_mask(s.u, m);
    apply_mask(s.A, m);
    apply_mask(s.W, m);
}

inline void apply_state_mask(ClassicalState& s, const ModeMask& m) {
    apply_mask(s.u, m);
    apply_mask(s.H, m);
}

namespace detail {
inline double combine_limits(double safety, double dx, double speed, double diffusivity, int dim) {
    double dt = std::numeric_limits<double>::infinity();
    if (speed > 0.0) dt = std::min(dt, dx / speed);
    if (diffusivity > 0.0) dt = std::min(dt, dx * dx / (2.0 * dim * diffusivity));
    return safety * dt;
}
}  // namespace detail

/// cfl_safety * min(dx/U_max, dx/c, dx^2/(2 d nu)).
inline double stable_dt(const NewMHDState& s, const PhysParams& p, const SpectralGrid& g, double cfl_safety) {
    const double umax = sup_norm(s.u);
    if (!std::isfinite(umax)) throw BlowUpError(s.t, "non-finite velocity in stable_dt");
    const double dx = g.min_dx();
    const double c = p.wave_speed();
    double dt = detail::combine_limits(cfl_safety, dx, umax, p.nu, g.dim());
    dt = std::min(dt, cfl_safety * dx / c);
    return dt;
}

/// Classical variant: advective speed U_max + Alfven speed |H|max/sqrt(rho0 mu0),
/// diffusive limit from max(nu, mu).
inline double stable_dt(const ClassicalState& s, const ClassicalParams& p, const SpectralGrid& g,
                        double cfl_safety) {
    const double umax = sup_norm(s.u);
    const double hmax = sup_norm(s.H);
    if (!std::isfinite(umax) || !std::isfinite(hmax)) throw BlowUpError(s.t, "non-finite field in stable_dt");
    const double speed = umax + hmax * std::sqrt(p.lorentz_coefficient());
    const double dt = detail::combine_limits(cfl_safety, g.min_dx(), speed, std::max(p.nu, p.mu_resistivity),
                                             g.dim());
    if (!std::isfinite(dt)) return cfl_safety * g.min_dx();
    return dt;
}

}  // namespace nmhd
