/// @file selfcheck.hpp
/// @brief Oracle-based measurements behind `nmhd verify` and the acceptance
///        suite. Each function returns the measured quantity; the caller
///        compares it with a tolerance.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "nmhd/driver.hpp"
#include "nmhd/verify.hpp"

namespace nmhd::checks {

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
    std::string detail;
};

/// value <= limit (NaN fails).
inline Check at_most(std::string name, double value, double limit, std::string detail = {}) {
    return {std::move(name), value, limit, value <= limit, std::move(detail)};
}

inline Check at_least(std::string name, double value, double limit, std::string detail = {}) {
    return {std::move(name), value, limit, value >= limit, std::move(detail)};
}

inline RealArray random_samples(const SpectralGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    RealArray s(g.npoints());
    for (double& x : s) x = U(rng);
    return s;
}

inline double max_abs_diff(const CoeffArray& a, const CoeffArray& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const CoeffArray& a) {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    return m;
}

/// Max relative error of the FFT-backed transform against direct summation.
inline double oracle_equivalence(int nfields, int n, std::uint64_t seed) {
    const GridPtr g = make_grid(3, n);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int f = 0; f < nfields; ++f) {
        const RealArray s = random_samples(*g, rng);
        const ScalarField fast = forward(g, s);
        const ScalarField slow = verify::dft_oracle(g, s);
        worst = std::max(worst, max_abs_diff(fast.c, slow.c) / max_abs(slow.c));
    }
    return worst;
}

/// Max relative round-trip error over random fields at each n.
inline double roundtrip_error(const std::vector<int>& ns, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int n : ns) {
        const GridPtr g = make_grid(dim, n);
        const RealArray s = random_samples(*g, rng);
        const RealArray back = inverse(forward(g, s));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            num += (back[i] - s[i]) * (back[i] - s[i]);
            den += s[i] * s[i];
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    return worst;
}

/// Random, Hermitian vector field with content on every mode.
inline VectorField random_vector_field(const GridPtr& g, std::mt19937_64& rng) {
    PhysicalField p;
    for (int d = 0; d < g->dim(); ++d) p.comp.push_back(random_samples(*g, rng));
    return forward(g, p);
}

struct ProjectionMeasure {
    double idempotence = 0.0;  ///< max |P(Pv) - Pv| / max |Pv|
    double divergence = 0.0;   ///< max over fields of max_k |k.Pv| / ||v||
};

inline ProjectionMeasure projection_properties(int nfields, int n, std::uint64_t seed) {
    const GridPtr g = make_grid(3, n);
    std::mt19937_64 rng(seed);
    ProjectionMeasure m;
    for (int f = 0; f < nfields; ++f) {
        const VectorField v = random_vector_field(g, rng);
        const VectorField p1 = leray_project(v);
        const VectorField p2 = leray_project(p1);
        double diff = 0.0, scale = 0.0;
        for (int d = 0; d < 3; ++d) {
            diff = std::max(diff, max_abs_diff(p1.c[d], p2.c[d]));
            scale = std::max(scale, max_abs(p1.c[d]));
        }
        m.idempotence = std::max(m.idempotence, diff / scale);
        m.divergence = std::max(m.divergence, divergence_max(p1) / norm(v));
    }
    return m;
}

/// Relative mismatch between physical and Parseval norms.
inline double parseval_error(int n, std::uint64_t seed) {
    const GridPtr g = make_grid(3, n);
    std::mt19937_64 rng(seed);
    const VectorField v = random_vector_field(g, rng);
    return std::abs(physical_norm(v) - norm(v)) / norm(v);
}

/// max(|curl grad f|, |div curl v|) relative to the input magnitudes.
inline double curl_identities(int n, std::uint64_t seed) {
    const GridPtr g = make_grid(3, n);
    std::mt19937_64 rng(seed);
    const ScalarField f = forward(g, random_samples(*g, rng));
    const VectorField v = random_vector_field(g, rng);
    const VectorField cg = curl(gradient(f));
    const ScalarField dc = divergence(curl(v));
    double a = 0.0, b = max_abs(dc.c);
    for (int d = 0; d < 3; ++d) a = std::max(a, max_abs(cg.c[d]));
    return std::max(a / max_abs(f.c), b / max_coeff(v));
}

struct WaveMeasure {
    double rel_error = 0.0;     ///< relative L2 error of (A, W) at t_end
    double energy_drift = 0.0;  ///< max |E(t) - E(0)| of E_wave + E_grad
};

/// Standing wave k = (1,0,0), e = (0,1,0) with u = 0, rho_e = 0.
inline WaveMeasure wave_regression(int n, double dt, double t_end) {
    const GridPtr g = make_grid(3, n);
    PhysParams p;  // c = 1
    const verify::WaveMode w{{1, 0, 0}, {0.0, 1.0, 0.0}, 1.0};
    NewMHDState s = NewMHDState::zero(g);
    std::tie(s.A, s.W) = verify::exact_wave(g, w, p.wave_speed(), 0.0);
    NewMHDSystem sys{p, {}, {}};
    auto energy = [&](const NewMHDState& st) {
        const EnergyReport r = energy_report(st, p, sys.forcing);
        return r.E_wave + r.E_grad;
    };
    const double e0 = energy(s);
    WaveMeasure m;
    const long steps = std::lround(t_end / dt);
    for (long i = 0; i < steps; ++i) {
        s = rk4_step(sys, s, dt);
        m.energy_drift = std::max(m.energy_drift, std::abs(energy(s) - e0));
    }
    const auto [A, W] = verify::exact_wave(g, w, p.wave_speed(), s.t);
    m.rel_error = std::sqrt((norm_sq(s.A - A) + norm_sq(s.W - W)) / (norm_sq(A) + norm_sq(W)));
    return m;
}

/// 2D Taylor-Green decay against the closed form.
inline double taylor_green_regression(int n, double nu, double dt, double t_end) {
    const GridPtr g = make_grid(2, n);
    PhysParams p;
    p.nu = nu;
    NewMHDState s = NewMHDState::zero(g);
    s.u = verify::taylor_green(g, 0.0, nu);
    NewMHDSystem sys{p, {}, {}};
    const long steps = std::lround(t_end / dt);
    for (long i = 0; i < steps; ++i) s = rk4_step(sys, s, dt);
    const VectorField exact = verify::taylor_green(g, s.t, nu);
    return norm(s.u - exact) / norm(exact);
}

inline verify::MmsConfig default_mms_config() {
    verify::MmsConfig c;
    c.params.nu = 0.05;
    c.params.rho_e = 1.0;
    c.t_end = 1.0;
    c.n_temporal = 8;
    c.dt_ladder = {0.1, 0.05, 0.025};
    c.dt_spatial = 1e-2;
    c.n_ladder = {8, 16};
    return c;
}

struct MmsMeasure {
    verify::MmsResult temporal;  ///< rotating single-mode target
    verify::MmsResult spatial;   ///< analytic, exponentially convergent target
    double zero_error = 0.0;
};

inline MmsMeasure mms_measure(const verify::MmsConfig& base) {
    MmsMeasure m;
    const double c = base.params.wave_speed();
    verify::MmsConfig tc = base;
    tc.n_ladder.clear();
    m.temporal = verify::mms_run(verify::rotating_mode_target(1.0, 2.0, 0.5, 0.5, c), tc);
    verify::MmsConfig sc = base;
    sc.dt_ladder.clear();
    sc.n_temporal = base.n_ladder.empty() ? base.n_temporal : base.n_ladder.front();
    m.spatial = verify::mms_run(verify::analytic_shear_target(1.0, 1.0, 0.5, c), sc);
    m.zero_error = verify::mms_solve(verify::zero_target(), base, base.n_temporal, base.dt_ladder.empty() ? 0.1 : base.dt_ladder.front());
    return m;
}

// ---------------------------------------------------------------------------
// Suites

inline std::vector<Check> spectral_suite() {
    std::vector<Check> out;
    out.push_back(at_most("transform vs direct DFT (20 fields, 8^3)", oracle_equivalence(20, 8, 1), 1e-12));
    out.push_back(at_most("round trip n in {4,8,16}", roundtrip_error({4, 8, 16}, 3, 2), 1e-13));
    const ProjectionMeasure pm = projection_properties(20, 16, 3);
    out.push_back(at_most("Leray idempotence", pm.idempotence, 1e-14));
    out.push_back(at_most("div after projection / ||v||", pm.divergence, 1e-13));
    out.push_back(at_most("Parseval", parseval_error(16, 4), 1e-12));
    out.push_back(at_most("curl grad = 0, div curl = 0", curl_identities(16, 5), 1e-13));
    return out;
}

inline std::vector<Check> wave_suite() {
    const WaveMeasure m = wave_regression(16, 1e-3, 1.0);
    return {at_most("standing wave rel. L2 error", m.rel_error, 1e-8),
            at_most("wave energy drift", m.energy_drift, 1e-10)};
}

inline std::vector<Check> tg_suite() {
    return {at_most("Taylor-Green rel. L2 error", taylor_green_regression(32, 0.1, 1e-3, 1.0), 1e-8)};
}

inline std::vector<Check> mms_suite() {
    const MmsMeasure m = mms_measure(default_mms_config());
    std::vector<Check> out;
    for (std::size_t i = 0; i < m.temporal.temporal_orders.size(); ++i) {
        const double q = m.temporal.temporal_orders[i];
        Check c{"MMS temporal order (rung " + std::to_string(i + 1) + ")", q, 4.0, std::abs(q - 4.0) <= 0.2, "4.0 +/- 0.2"};
        out.push_back(c);
    }
    for (double r : m.spatial.spatial_ratios) out.push_back(at_least("MMS spatial error drop 8 -> 16", r, 10.0));
    out.push_back(at_most("MMS zero target error", m.zero_error, 0.0));
    return out;
}

inline std::vector<Check> run_suite(const std::string& name) {
    if (name == "spectral") return spectral_suite();
    if (name == "wave") return wave_suite();
    if (name == "tg") return tg_suite();
    if (name == "mms") return mms_suite();
    if (name == "all") {
        std::vector<Check> out;
        for (const char* s : {"spectral", "wave", "tg", "mms"}) {
            auto part = run_suite(s);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    throw ArgumentError("unknown suite '" + name + "' (spectral|wave|tg|mms|all)");
}

}  // namespace nmhd::checks
