/// @file galerkin.hpp
/// @brief Nested spectral truncations (the Galerkin approximations u^k, A^k)
///        and the a-priori energy bounds they must satisfy.
///
/// On the periodic box the Stokes eigenfunctions are solenoidal Fourier
/// modes with eigenvalue |k|^2, so the k-th Galerkin space is the span of the
/// k lowest mode pairs (+k, -k); the projector P_k is a mode mask.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nmhd/diagnostics.hpp"
#include "nmhd/timestep.hpp"

namespace nmhd {

/// Hermitian mode pairs sorted by |k|^2, ties broken lexicographically by
/// the integer index (m1, m2, m3) of the pair representative. The zero mode
/// is not ranked.
class ModeOrdering {
public:
    struct Entry {
        std::size_t mode;       ///< stored index
        std::size_t conjugate;  ///< stored index of the partner (== mode if not stored separately)
        double lambda;          ///< |k|^2
        std::array<int, 3> key; ///< representative integer index
    };

    explicit ModeOrdering(const SpectralGrid& g) : nmodes_(g.nmodes()) {
        for (std::size_t i = 0; i < g.nmodes(); ++i) {
            std::array<int, 3> m{g.m(0, i), g.m(1, i), g.m(2, i)};
            if (m == std::array<int, 3>{0, 0, 0}) continue;
            std::size_t conj = i;
            if (g.on_self_conjugate_plane(i)) {
                conj = g.conjugate_index(i);
                if (conj < i) continue;  // pair already listed
            }
            std::array<int, 3> neg{};
            for (int d = 0; d < 3; ++d) neg[d] = (2 * std::abs(m[d]) == g.n(d)) ? m[d] : -m[d];
            entries_.push_back({i, conj, g.ksq(i), std::max(m, neg)});
        }
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            if (a.lambda != b.lambda) return a.lambda < b.lambda;
            return a.key < b.key;
        });
    }

    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Mask retaining the k lowest pairs (and the zero mode).
    ModeMask mask(std::size_t k) const {
        if (k < 1 || k > entries_.size())
            throw ArgumentError("Galerkin truncation k=" + std::to_string(k) + " out of range [1, " +
                                std::to_string(entries_.size()) + "]");
        ModeMask m(nmodes_, 0);
        m[0] = 1;
        for (std::size_t r = 0; r < k; ++r) {
            m[entries_[r].mode] = 1;
            m[entries_[r].conjugate] = 1;
        }
        return m;
    }

private:
    std::size_t nmodes_;
    std::vector<Entry> entries_;
};

/// The projector P_k applied to every field of a state.
template <class State>
State truncate_modes(const State& s, std::size_t k) {
    const ModeOrdering order(*s.u.grid);
    State out = s;
    apply_state_mask(out, order.mask(k));
    return out;
}

// ---------------------------------------------------------------------------
// A-priori bounds

/// Norms of the (untruncated) data entering the bounds. Norms are unsquared.
struct InitialNorms {
    double phi = 0.0;       ///< ||u(0)||
    double eta = 0.0;       ///< ||A_t(0)||
    double grad_psi = 0.0;  ///< ||grad A(0)||
    double f = 0.0;         ///< ||f||
    double energy0 = 0.0;   ///< ||u||^2 + ||W||^2 + c^2 ||grad A||^2 of the evolved initial state
};

struct NormSample {
    double t = 0.0;
    double u_sq = 0.0;
    double W_sq = 0.0;
    double gradA_sq = 0.0;
};

struct BoundReport {
    double t = 0.0;
    double lhs = 0.0;       ///< ||u||^2 + ||W||^2
    double lhs_grad = 0.0;  ///< ||grad A||^2
    double rhs_paper = 0.0;
    double rhs_paper_grad = 0.0;
    double rhs_derived = 0.0;
    bool derived_ok = true;
    bool paper_ok = true;
    bool paper_grad_ok = true;
};

inline NormSample norm_sample(const NewMHDState& s) {
    return {s.t, norm_sq(s.u), norm_sq(s.W), grad_norm_sq(s.A)};
}

inline InitialNorms initial_norms(const NewMHDState& data, const NewMHDState& evolved, const PhysParams& p,
                                  const VectorField* f) {
    InitialNorms n;
    n.phi = norm(data.u);
    n.eta = norm(data.W);
    n.grad_psi = std::sqrt(grad_norm_sq(data.A));
    n.f = f && f->grid ? norm(*f) : 0.0;
    n.energy0 = norm_sq(evolved.u) + norm_sq(evolved.W) + p.wave_speed_sq() * grad_norm_sq(evolved.A);
    return n;
}

/// Evaluates, at one sample,
///  - the literal Gronwall bound 2(|phi|+|eta|+|grad psi|+|f|) e^{(2+rho_e/eps0)t}
///    (and its gradient line with T|f|, T = t), informational only;
///  - the bound re-derived from the exact energy identities,
///    (E(0) + t|f|^2) e^{(2+|rho_e/eps0|)t}, on the combined energy
///    |u|^2 + |W|^2 + c^2 |grad A|^2. Violating it is a hard failure.
inline BoundReport bound_at(const NormSample& h, const PhysParams& p, const InitialNorms& n) {
    BoundReport b;
    b.t = h.t;
    b.lhs = h.u_sq + h.W_sq;
    b.lhs_grad = h.gradA_sq;
    const double r = p.rho_e / p.eps0;
    const double grow_paper = std::exp((2.0 + r) * h.t);
    b.rhs_paper = 2.0 * (n.phi + n.eta + n.grad_psi + n.f) * grow_paper;
    b.rhs_paper_grad = 2.0 * (n.phi + n.eta + n.grad_psi + h.t * n.f) * grow_paper;
    b.rhs_derived = (n.energy0 + h.t * n.f * n.f) * std::exp((2.0 + std::abs(r)) * h.t);
    const double combined = b.lhs + p.wave_speed_sq() * b.lhs_grad;
    // Relative slack of a few ulps for round-off in the norms themselves.
    b.derived_ok = combined <= b.rhs_derived * (1.0 + 1e-12) + 1e-300;
    b.paper_ok = b.lhs <= b.rhs_paper;
    b.paper_grad_ok = b.lhs_grad <= b.rhs_paper_grad;
    return b;
}

inline std::vector<BoundReport> apriori_bound_check(const std::vector<NormSample>& history, const PhysParams& p,
                                                    const InitialNorms& n) {
    std::vector<BoundReport> out;
    out.reserve(history.size());
    for (const auto& h : history) out.push_back(bound_at(h, p, n));
    return out;
}

/// Classical analogue: |u|^2 + |H|^2/(rho0 mu0) <= (E(0) + t|f|^2) e^{2t}.
inline BoundReport classical_bound_at(const ClassicalState& s, const ClassicalParams& p, double energy0,
                                      double f_norm) {
    BoundReport b;
    b.t = s.t;
    b.lhs = norm_sq(s.u) + p.lorentz_coefficient() * norm_sq(s.H);
    b.rhs_paper = std::numeric_limits<double>::quiet_NaN();
    b.rhs_paper_grad = b.rhs_paper;
    b.rhs_derived = (energy0 + s.t * f_norm * f_norm) * std::exp(2.0 * s.t);
    b.derived_ok = b.lhs <= b.rhs_derived * (1.0 + 1e-12) + 1e-300;
    b.paper_ok = b.paper_grad_ok = true;
    return b;
}

// ---------------------------------------------------------------------------
// Approximation sequence

struct SequenceConfig {
    NewMHDState initial;  ///< untruncated data (phi, psi, eta)
    PhysParams params;
    Forcing forcing;
    ModelOptions options;
    double dt = 1e-3;
    double t_end = 0.5;
    int sample_every = 50;  ///< steps between difference samples
};

struct DifferenceRow {
    double t;
    std::size_t k;
    std::size_t k_next;
    double diff;  ///< ||u^{k_next} - u^k||
};

struct MemberResult {
    std::size_t k = 0;
    bool ok = true;
    std::string error;
    std::vector<BoundReport> bounds;
    NewMHDState final_state;
};

struct SequenceResult {
    std::vector<DifferenceRow> rows;
    std::vector<MemberResult> members;

    /// Differences at the last sample time, in order of ks.
    std::vector<double> final_differences() const {
        std::vector<double> d;
        if (rows.empty()) return d;
        const double tl = rows.back().t;
        for (const auto& r : rows)
            if (r.t == tl) d.push_back(r.diff);
        return d;
    }
};

/// Evolves every truncated system P_k in lockstep with the same dt and
/// records successive differences at sample times. A member that blows up
/// is marked failed and dropped from later comparisons.
inline SequenceResult run_sequence(const SequenceConfig& cfg, const std::vector<std::size_t>& ks) {
    if (ks.empty()) throw ArgumentError("empty Galerkin sequence");
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (ks[i] <= ks[i - 1]) throw ArgumentError("Galerkin ks must be strictly increasing");
    if (!(cfg.dt > 0.0) || !(cfg.t_end >= 0.0)) throw ArgumentError("invalid dt or t_end");

    const GridPtr& g = cfg.initial.u.grid;
    const ModeOrdering order(*g);
    NewMHDSystem base{cfg.params, cfg.forcing, cfg.options};

    struct Member {
        MaskedSystem<NewMHDSystem> sys;
        NewMHDState state;
        InitialNorms norms;
    };
    std::vector<Member> members;
    SequenceResult result;
    for (std::size_t k : ks) {
        ModeMask mask = order.mask(k);
        NewMHDState s = cfg.initial;
        apply_state_mask(s, mask);
        const VectorField* f = cfg.forcing.has_static() ? &cfg.forcing.f : nullptr;
        InitialNorms n = initial_norms(cfg.initial, s, cfg.params, f);
        members.push_back({MaskedSystem<NewMHDSystem>{base, std::move(mask)}, std::move(s), n});
        MemberResult mr;
        mr.k = k;
        result.members.push_back(std::move(mr));
    }

    auto sample = [&]() {
        for (std::size_t i = 0; i < members.size(); ++i)
            if (result.members[i].ok)
                result.members[i].bounds.push_back(bound_at(norm_sample(members[i].state), cfg.params, members[i].norms));
        for (std::size_t i = 0; i + 1 < members.size(); ++i) {
            if (!result.members[i].ok || !result.members[i + 1].ok) continue;
            const double d = norm(members[i + 1].state.u - members[i].state.u);
            result.rows.push_back({members[i].state.t, ks[i], ks[i + 1], d});
        }
    };

    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    sample();
    for (long step = 1; step <= nsteps; ++step) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (!result.members[i].ok) continue;
            try {
                members[i].state = rk4_step(members[i].sys, members[i].state, cfg.dt);
            } catch (const BlowUpError& e) {
                result.members[i].ok = false;
                result.members[i].error = e.what();
            }
        }
        if (step % cfg.sample_every == 0 || step == nsteps) sample();
    }
    for (std::size_t i = 0; i < members.size(); ++i) result.members[i].final_state = members[i].state;
    return result;
}

}  // namespace nmhd
