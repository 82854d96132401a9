/// @file diagnostics.hpp
/// @brief Energy ledger, constraint monitors, weak-form residuals and
///        recovery of H and E.
#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "nmhd/model_classical.hpp"

namespace nmhd {

struct EnergyReport {
    double t = 0.0;
    double E_kin = 0.0;       ///< 1/2 ||u||^2
    double E_wave = 0.0;      ///< 1/2 ||W||^2 (classical: 0)
    double E_grad = 0.0;      ///< 1/(2 eps0 mu0) ||grad A||^2 (classical: ||H||^2/(2 rho0 mu0))
    double dissipation = 0.0; ///< nu ||grad u||^2 (classical: + mu/(rho0 mu0) ||grad H||^2)
    double work_f = 0.0;      ///< <f, u>
    double coupling = 0.0;    ///< (rho_e/eps0) <u, W> (classical: Lorentz work on u)
    double residual_u = 0.0;
    double residual_A = 0.0;
    double div_u_max = 0.0;
    double div_A_max = 0.0;   ///< classical: div H
    double phi_grad_max = 0.0;

    double u_norm = 0.0;
    double A_norm = 0.0;  ///< classical: ||H||
    double W_norm = 0.0;
    /// Instantaneous rates of the two balanced energies.
    double rate_u = 0.0;
    double rate_A = 0.0;
    double energy_u() const { return E_kin; }
    double energy_A() const { return E_wave + E_grad; }
};

namespace detail {
/// Max over modes of the per-mode vector magnitude.
inline double max_mode_magnitude(const VectorField& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.grid->nmodes(); ++i) {
        double s = 0.0;
        for (int d = 0; d < v.ncomp(); ++d) s += std::norm(v.c[d][i]);
        m = std::max(m, std::sqrt(s));
    }
    return m;
}
}  // namespace detail

inline EnergyReport energy_report(const NewMHDState& s, const PhysParams& p, const Forcing& forcing) {
    EnergyReport r;
    r.t = s.t;
    const double c2 = p.wave_speed_sq();
    r.u_norm = norm(s.u);
    r.A_norm = norm(s.A);
    r.W_norm = norm(s.W);
    r.E_kin = 0.5 * r.u_norm * r.u_norm;
    r.E_wave = 0.5 * r.W_norm * r.W_norm;
    r.E_grad = 0.5 * c2 * grad_norm_sq(s.A);
    r.dissipation = p.nu * grad_norm_sq(s.u);
    auto [f, gA] = forcing.at(s.u.grid, s.t);
    r.work_f = inner(f, s.u);
    r.coupling = p.rho_e / p.eps0 * inner(s.u, s.W);
    r.rate_u = -r.dissipation + r.work_f;
    r.rate_A = r.coupling + inner(gA, s.W);
    r.div_u_max = divergence_max(s.u);
    r.div_A_max = divergence_max(s.A);
    r.phi_grad_max = detail::max_mode_magnitude(recover_phi_gradient(s, p));
    return r;
}

inline EnergyReport energy_report(const ClassicalState& s, const ClassicalParams& p, const VectorField& f,
                                  const ModelOptions& opt = {}) {
    EnergyReport r;
    r.t = s.t;
    const double kappa = p.lorentz_coefficient();
    r.u_norm = norm(s.u);
    r.A_norm = norm(s.H);
    r.E_kin = 0.5 * r.u_norm * r.u_norm;
    r.E_grad = 0.5 * kappa * r.A_norm * r.A_norm;
    const double viscous = p.nu * grad_norm_sq(s.u);
    const double ohmic = kappa * p.mu_resistivity * grad_norm_sq(s.H);
    r.dissipation = viscous + ohmic;
    r.work_f = f.grid ? inner(f, s.u) : 0.0;
    r.coupling = kappa * inner(magnetic_tension(s.H, inverse(s.H), opt.dealias), s.u);
    r.rate_u = -viscous + r.work_f + r.coupling;
    r.rate_A = -ohmic - r.coupling;
    r.div_u_max = divergence_max(s.u);
    r.div_A_max = divergence_max(s.H);
    return r;
}

/// Fills residual_u / residual_A of successive reports: the defect between
/// the finite-difference energy change and the trapezoidal mean rate.
class EnergyLedger {
public:
    EnergyReport& push(EnergyReport r) {
        if (!reports_.empty()) {
            const EnergyReport& q = reports_.back();
            const double h = r.t - q.t;
            if (h > 0.0) {
                r.residual_u = (r.energy_u() - q.energy_u()) / h - 0.5 * (r.rate_u + q.rate_u);
                r.residual_A = (r.energy_A() - q.energy_A()) / h - 0.5 * (r.rate_A + q.rate_A);
            }
        }
        reports_.push_back(r);
        return reports_.back();
    }
    const std::vector<EnergyReport>& reports() const { return reports_; }
    double max_abs_residual_u() const { return max_of([](const EnergyReport& r) { return std::abs(r.residual_u); }); }
    double max_abs_residual_A() const { return max_of([](const EnergyReport& r) { return std::abs(r.residual_A); }); }

private:
    template <class F>
    double max_of(F f) const {
        double m = 0.0;
        for (const auto& r : reports_) m = std::max(m, f(r));
        return m;
    }
    std::vector<EnergyReport> reports_;
};

// ---------------------------------------------------------------------------
// Weak-form residual

namespace detail {
inline double grad_inner(const VectorField& a, const VectorField& b) {
    const auto& g = *a.grid;
    const auto& w = g.weights();
    const auto& k2 = g.ksq();
    double s = 0.0;
    for (int d = 0; d < a.ncomp(); ++d)
        for (std::size_t i = 0; i < g.nmodes(); ++i)
            s += w[i] * k2[i] * (a.c[d][i].real() * b.c[d][i].real() + a.c[d][i].imag() * b.c[d][i].imag());
    return g.volume() * s;
}
}  // namespace detail

/// Accumulates both weak-form identities along a trajectory with
/// trapezoidal time quadrature:
///   <u(t),v> + int_0^t <(u.grad)u,v> + nu<grad u,grad v> - (rho_e/rho0)<u x curl A,v> - <f,v> = <phi,v>
///   <W(t),v> + int_0^t c^2<grad A,grad v> - (rho_e/eps0)<u,v> - <g_A,v> = <eta,v>
class WeakFormResidual {
public:
    WeakFormResidual(std::vector<VectorField> tests, PhysParams params, Forcing forcing, ModelOptions opt = {})
        : tests_(std::move(tests)), params_(params), forcing_(std::move(forcing)), opt_(opt) {
        for (const auto& v : tests_)
            if (!is_solenoidal(v)) throw ArgumentError("weak-form test field is not solenoidal");
        integral_u_.assign(tests_.size(), 0.0);
        integral_A_.assign(tests_.size(), 0.0);
        prev_u_.assign(tests_.size(), 0.0);
        prev_A_.assign(tests_.size(), 0.0);
    }

    /// First call fixes the initial data (phi, eta); later calls advance.
    void push(const NewMHDState& s) {
        std::vector<double> iu(tests_.size()), ia(tests_.size());
        integrands(s, iu, ia);
        if (!started_) {
            phi_dot_.resize(tests_.size());
            eta_dot_.resize(tests_.size());
            for (std::size_t j = 0; j < tests_.size(); ++j) {
                phi_dot_[j] = inner(s.u, tests_[j]);
                eta_dot_[j] = inner(s.W, tests_[j]);
            }
            started_ = true;
        } else {
            const double h = s.t - t_prev_;
            for (std::size_t j = 0; j < tests_.size(); ++j) {
                integral_u_[j] += 0.5 * h * (prev_u_[j] + iu[j]);
                integral_A_[j] += 0.5 * h * (prev_A_[j] + ia[j]);
                const double du = inner(s.u, tests_[j]) + integral_u_[j] - phi_dot_[j];
                const double dA = inner(s.W, tests_[j]) + integral_A_[j] - eta_dot_[j];
                max_u_ = std::max(max_u_, std::abs(du));
                max_A_ = std::max(max_A_, std::abs(dA));
            }
        }
        prev_u_ = iu;
        prev_A_ = ia;
        t_prev_ = s.t;
    }

    /// Max over sample times and test fields of the absolute defects.
    std::pair<double, double> result() const { return {max_u_, max_A_}; }

private:
    void integrands(const NewMHDState& s, std::vector<double>& iu, std::vector<double>& ia) const {
        const PhysicalField up = inverse(s.u);
        VectorField bracket = opt_.advection ? advection_term(s.u, up, opt_.dealias) : VectorField(s.u.grid);
        if (params_.rho_e != 0.0) bracket.add_scaled(lorentz_term(up, s.A, params_, opt_.dealias), -1.0);
        auto [f, gA] = forcing_.at(s.u.grid, s.t);
        if (opt_.dealias) {
            dealias_inplace(f);
            dealias_inplace(gA);
        }
        bracket -= f;
        const double c2 = params_.wave_speed_sq();
        for (std::size_t j = 0; j < tests_.size(); ++j) {
            const VectorField& v = tests_[j];
            iu[j] = inner(bracket, v) + params_.nu * detail::grad_inner(s.u, v);
            ia[j] = c2 * detail::grad_inner(s.A, v) - params_.rho_e / params_.eps0 * inner(s.u, v) - inner(gA, v);
        }
    }

    std::vector<VectorField> tests_;
    PhysParams params_;
    Forcing forcing_;
    ModelOptions opt_;
    bool started_ = false;
    double t_prev_ = 0.0;
    std::vector<double> phi_dot_, eta_dot_;
    std::vector<double> integral_u_, integral_A_, prev_u_, prev_A_;
    double max_u_ = 0.0, max_A_ = 0.0;
};

/// Convenience form over a stored trajectory. The first state supplies the
/// initial data; `phi0`, when given, replaces its velocity as phi.
inline std::pair<double, double> weak_form_residual(const std::vector<NewMHDState>& trajectory,
                                                    const std::vector<VectorField>& tests, const PhysParams& p,
                                                    const Forcing& forcing, const ModelOptions& opt = {},
                                                    const VectorField* phi0 = nullptr) {
    if (trajectory.empty()) return {0.0, 0.0};
    WeakFormResidual acc(tests, p, forcing, opt);
    if (phi0) {
        NewMHDState first = trajectory.front();
        first.u = *phi0;
        acc.push(first);
    } else {
        acc.push(trajectory.front());
    }
    for (std::size_t i = 1; i < trajectory.size(); ++i) acc.push(trajectory[i]);
    return acc.result();
}

// ---------------------------------------------------------------------------

struct RecoveredFields {
    VectorField H;   ///< curl A (3D)
    ScalarField Hz;  ///< out-of-plane curl A (2D)
    VectorField E;   ///< -dA/dt; the electrostatic gradient vanishes on solenoidal states
};

inline RecoveredFields recover_fields(const NewMHDState& s, const PhysParams&) {
    RecoveredFields r;
    if (s.A.grid->dim() == 3) {
        r.H = curl(s.A);
    } else {
        r.Hz = curl_scalar(s.A);
    }
    r.E = s.W;
    r.E *= -1.0;
    return r;
}

}  // namespace nmhd
