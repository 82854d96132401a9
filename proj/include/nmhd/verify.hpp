/// @file verify.hpp
/// @brief Independent oracles: direct-summation DFT, closed-form exact
///        solutions and manufactured solutions.
///
/// Nothing here uses the differential operators of spectral.hpp. Closed
/// forms are sampled pointwise; the DFT oracle sums every term explicitly.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nmhd/timestep.hpp"

namespace nmhd::verify {

using Vec3 = std::array<double, 3>;

/// O(N^2) discrete Fourier transform with the normalization of forward().
/// Limited to n <= 8 per axis.
inline ScalarField dft_oracle(const GridPtr& grid, std::span<const double> samples) {
    const auto& g = *grid;
    for (int d = 0; d < g.dim(); ++d)
        if (g.n(d) > 8) throw ArgumentError("dft_oracle size cap exceeded (n <= 8 per axis)");
    check_samples(g, samples.size());

    // twiddle[d][m_index][i] = exp(-2 pi i m i / n), phase reduced mod n.
    std::array<std::vector<std::vector<cplx>>, 3> tw;
    const auto& spec = g.spectral_shape();
    for (int d = 0; d < 3; ++d) {
        const int n = g.n(d);
        tw[d].assign(spec[d], std::vector<cplx>(n));
        for (int mi = 0; mi < spec[d]; ++mi) {
            for (int i = 0; i < n; ++i) {
                const int r = (mi * i) % n;
                tw[d][mi][i] = std::polar(1.0, -2.0 * std::numbers::pi * r / n);
            }
        }
    }
    ScalarField out(grid);
    const double scale = 1.0 / double(g.npoints());
    for (int a = 0; a < spec[0]; ++a)
        for (int b = 0; b < spec[1]; ++b)
            for (int c = 0; c < spec[2]; ++c) {
                cplx acc{};
                for (int i0 = 0; i0 < g.n(0); ++i0)
                    for (int i1 = 0; i1 < g.n(1); ++i1) {
                        const cplx w01 = tw[0][a][i0] * tw[1][b][i1];
                        for (int i2 = 0; i2 < g.n(2); ++i2)
                            acc += samples[g.point_index(i0, i1, i2)] * w01 * tw[2][c][i2];
                    }
                out.c[g.mode_index(a, b, c)] = acc * scale;
            }
    return out;
}

// ---------------------------------------------------------------------------
// Standing wave of the potential equation with u = 0, Phi = 0

struct WaveMode {
    std::array<int, 3> kvec{1, 0, 0};
    Vec3 evec{0.0, 1.0, 0.0};
    double amp = 1.0;
};

inline Vec3 physical_k(const SpectralGrid& g, const std::array<int, 3>& m) {
    Vec3 k{};
    for (int d = 0; d < g.dim(); ++d) k[d] = g.wavenumber(d, m[d]);
    return k;
}

inline void check_polarization(const SpectralGrid& g, const WaveMode& w) {
    const Vec3 k = physical_k(g, w.kvec);
    const double dot = k[0] * w.evec[0] + k[1] * w.evec[1] + k[2] * w.evec[2];
    const double scale = std::hypot(k[0], k[1], k[2]) * std::hypot(w.evec[0], w.evec[1], w.evec[2]);
    if (std::abs(dot) > 1e-12 * (scale + 1e-300)) throw ArgumentError("polarization not orthogonal to kvec");
    for (int d = g.dim(); d < 3; ++d)
        if (w.kvec[d] != 0 || w.evec[d] != 0.0) throw ArgumentError("wave mode has components beyond dim");
}

/// A = amp e cos(k.x) cos(c|k|t), W = dA/dt.
inline std::pair<VectorField, VectorField> exact_wave(const GridPtr& grid, const WaveMode& w, double c, double t) {
    check_polarization(*grid, w);
    const Vec3 k = physical_k(*grid, w.kvec);
    const double omega = c * std::hypot(k[0], k[1], k[2]);
    const double ct = std::cos(omega * t), st = std::sin(omega * t);
    auto shape = [k](double x, double y, double z) { return std::cos(k[0] * x + k[1] * y + k[2] * z); };
    VectorField A = sample(grid, [&](double x, double y, double z) {
        const double s = w.amp * shape(x, y, z) * ct;
        return Vec3{s * w.evec[0], s * w.evec[1], s * w.evec[2]};
    });
    VectorField W = sample(grid, [&](double x, double y, double z) {
        const double s = -w.amp * shape(x, y, z) * omega * st;
        return Vec3{s * w.evec[0], s * w.evec[1], s * w.evec[2]};
    });
    A.solenoidal_flag = W.solenoidal_flag = true;
    return {std::move(A), std::move(W)};
}

/// 2D Taylor-Green vortex e^{-2 nu t} (cos x sin y, -sin x cos y) on [0, 2pi)^2.
inline VectorField taylor_green(const GridPtr& grid, double t, double nu) {
    if (grid->dim() != 2) throw ArgumentError("taylor_green requires dim=2");
    const double a = std::exp(-2.0 * nu * t);
    VectorField u = sample(grid, [a](double x, double y, double) {
        return Vec3{a * std::cos(x) * std::sin(y), -a * std::sin(x) * std::cos(y), 0.0};
    });
    u.solenoidal_flag = true;
    return u;
}

/// Closed-form pressure of the Taylor-Green vortex, -(rho0/4) e^{-4 nu t}(cos 2x + cos 2y).
inline ScalarField taylor_green_pressure(const GridPtr& grid, double t, double nu, double rho0) {
    const double a = std::exp(-4.0 * nu * t);
    return sample(grid, [=](double x, double y, double) {
        return -0.25 * rho0 * a * (std::cos(2.0 * x) + std::cos(2.0 * y));
    });
}

// ---------------------------------------------------------------------------
// Manufactured solutions

using PointTime = std::function<Vec3(double, double, double, double)>;

/// Analytic trajectory (u*, A*) with every derivative needed to insert it
/// into the equations, each supplied in closed form.
struct MmsTarget {
    std::string name;
    PointTime u, u_t, u_lap, u_adv;  ///< u_adv = (u.grad)u
    PointTime A, A_t, A_tt, A_lap, curl_A;
};

inline Vec3 cross3(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Vec3 mms_momentum_source(const MmsTarget& tg, const PhysParams& p, double x, double y, double z, double t) {
    const Vec3 u = tg.u(x, y, z, t), ut = tg.u_t(x, y, z, t), lap = tg.u_lap(x, y, z, t),
               adv = tg.u_adv(x, y, z, t);
    const Vec3 lor = cross3(u, tg.curl_A(x, y, z, t));
    const double q = p.rho_e / p.rho0;
    Vec3 f;
    for (int d = 0; d < 3; ++d) f[d] = ut[d] + adv[d] - q * lor[d] - p.nu * lap[d];
    return f;
}

inline Vec3 mms_potential_source(const MmsTarget& tg, const PhysParams& p, double x, double y, double z, double t) {
    const Vec3 att = tg.A_tt(x, y, z, t), lap = tg.A_lap(x, y, z, t), u = tg.u(x, y, z, t);
    const double c2 = p.wave_speed_sq(), r = p.rho_e / p.eps0;
    Vec3 g;
    for (int d = 0; d < 3; ++d) g[d] = att[d] - c2 * lap[d] - r * u[d];
    return g;
}

/// Forcing whose time-dependent sources make `tg` an exact solution.
inline Forcing mms_forcing(const MmsTarget& tg, const PhysParams& p) {
    Forcing fo;
    fo.source = [tg, p](double t, VectorField& f, VectorField& gA) {
        const GridPtr& grid = f.grid;
        f += sample(grid, [&](double x, double y, double z) { return mms_momentum_source(tg, p, x, y, z, t); });
        gA += sample(grid, [&](double x, double y, double z) { return mms_potential_source(tg, p, x, y, z, t); });
    };
    return fo;
}

inline NewMHDState mms_state(const MmsTarget& tg, const GridPtr& grid, double t) {
    NewMHDState s;
    s.t = t;
    s.u = sample(grid, [&](double x, double y, double z) { return tg.u(x, y, z, t); });
    s.A = sample(grid, [&](double x, double y, double z) { return tg.A(x, y, z, t); });
    s.W = sample(grid, [&](double x, double y, double z) { return tg.A_t(x, y, z, t); });
    s.u.solenoidal_flag = s.A.solenoidal_flag = s.W.solenoidal_flag = true;
    return s;
}

/// A* = b e_z cos(x) cos(c t): the exact standing wave with k = (1,0,0).
inline void attach_standing_wave(MmsTarget& tg, double b, double c) {
    tg.A = [b, c](double x, double, double, double t) { return Vec3{0.0, 0.0, b * std::cos(x) * std::cos(c * t)}; };
    tg.A_t = [b, c](double x, double, double, double t) {
        return Vec3{0.0, 0.0, -b * c * std::cos(x) * std::sin(c * t)};
    };
    tg.A_tt = [b, c](double x, double, double, double t) {
        return Vec3{0.0, 0.0, -b * c * c * std::cos(x) * std::cos(c * t)};
    };
    tg.A_lap = [b, c](double x, double, double, double t) {
        return Vec3{0.0, 0.0, -b * std::cos(x) * std::cos(c * t)};
    };
    // curl (0,0,A3) = (d_y A3, -d_x A3, 0)
    tg.curl_A = [b, c](double x, double, double, double t) {
        return Vec3{0.0, b * std::sin(x) * std::cos(c * t), 0.0};
    };
}

/// u* = a(cos(wt) sin z, sin(wt) sin z, 0) + s (0, 0, sin x): a single
/// Fourier mode whose polarization rotates, plus a steady cross mode that
/// makes (u.grad)u nonzero. A* is the exact standing wave.
inline MmsTarget rotating_mode_target(double a, double omega, double s, double b, double c) {
    MmsTarget tg;
    tg.name = "rotating_mode";
    tg.u = [=](double x, double, double z, double t) {
        return Vec3{a * std::cos(omega * t) * std::sin(z), a * std::sin(omega * t) * std::sin(z), s * std::sin(x)};
    };
    tg.u_t = [=](double, double, double z, double t) {
        return Vec3{-a * omega * std::sin(omega * t) * std::sin(z), a * omega * std::cos(omega * t) * std::sin(z), 0.0};
    };
    tg.u_lap = [=](double x, double, double z, double t) {
        return Vec3{-a * std::cos(omega * t) * std::sin(z), -a * std::sin(omega * t) * std::sin(z), -s * std::sin(x)};
    };
    // u1 d_x u + u3 d_z u, with d_x u = (0,0,s cos x), d_z u = (al cos z, be cos z, 0)
    tg.u_adv = [=](double x, double, double z, double t) {
        const double al = a * std::cos(omega * t), be = a * std::sin(omega * t);
        return Vec3{s * std::sin(x) * al * std::cos(z), s * std::sin(x) * be * std::cos(z),
                    al * std::sin(z) * s * std::cos(x)};
    };
    attach_standing_wave(tg, b, c);
    return tg;
}

/// u* = cos(wt) (exp(beta sin z), 0, exp(beta cos x)): analytic, not
/// band-limited, with exponentially decaying spectrum.
inline MmsTarget analytic_shear_target(double beta, double omega, double b, double c) {
    MmsTarget tg;
    tg.name = "analytic_shear";
    auto G = [beta](double z) { return std::exp(beta * std::sin(z)); };
    auto Q = [beta](double x) { return std::exp(beta * std::cos(x)); };
    tg.u = [=](double x, double, double z, double t) { return Vec3{std::cos(omega * t) * G(z), 0.0, std::cos(omega * t) * Q(x)}; };
    tg.u_t = [=](double x, double, double z, double t) {
        const double ds = -omega * std::sin(omega * t);
        return Vec3{ds * G(z), 0.0, ds * Q(x)};
    };
    tg.u_lap = [=](double x, double, double z, double t) {
        const double s = std::cos(omega * t);
        const double g2 = (beta * beta * std::cos(z) * std::cos(z) - beta * std::sin(z)) * G(z);
        const double q2 = (beta * beta * std::sin(x) * std::sin(x) - beta * std::cos(x)) * Q(x);
        return Vec3{s * g2, 0.0, s * q2};
    };
    // (u3 d_z u1, 0, u1 d_x u3)
    tg.u_adv = [=](double x, double, double z, double t) {
        const double s = std::cos(omega * t);
        const double g1 = beta * std::cos(z) * G(z), q1 = -beta * std::sin(x) * Q(x);
        return Vec3{s * s * Q(x) * g1, 0.0, s * s * G(z) * q1};
    };
    attach_standing_wave(tg, b, c);
    return tg;
}

inline MmsTarget zero_target() {
    MmsTarget tg;
    tg.name = "zero";
    auto z = [](double, double, double, double) { return Vec3{0.0, 0.0, 0.0}; };
    tg.u = tg.u_t = tg.u_lap = tg.u_adv = z;
    tg.A = tg.A_t = tg.A_tt = tg.A_lap = tg.curl_A = z;
    return tg;
}

struct MmsConfig {
    PhysParams params;
    double t_end = 1.0;
    int n_temporal = 8;                  ///< resolution of the dt ladder
    std::vector<double> dt_ladder;       ///< decreasing
    double dt_spatial = 1e-3;            ///< step of the resolution ladder
    std::vector<int> n_ladder;           ///< increasing
    bool dealias = true;
    double band_tolerance = 1e-3;
};

struct MmsResult {
    std::vector<double> dt_errors;
    std::vector<double> temporal_orders;  ///< between consecutive dt
    std::vector<double> n_errors;
    std::vector<double> spatial_ratios;   ///< error(n_i)/error(n_{i+1})
};

/// Relative L2 distance of (u, A, W) from the target at the state's time.
inline double mms_error(const NewMHDState& s, const MmsTarget& tg) {
    const NewMHDState ex = mms_state(tg, s.u.grid, s.t);
    const double num = norm_sq(s.u - ex.u) + norm_sq(s.A - ex.A) + norm_sq(s.W - ex.W);
    const double den = norm_sq(ex.u) + norm_sq(ex.A) + norm_sq(ex.W);
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

/// Rejects targets that the coarsest grid samples with aliasing: the
/// coefficients on shared modes must agree with a grid of twice the finest
/// resolution to `tol` relative to the field's largest coefficient.
inline void check_band_limited(const MmsTarget& tg, int n_coarse, int n_fine, double t, double tol) {
    const GridPtr gc = make_grid(3, n_coarse), gf = make_grid(3, 2 * n_fine);
    const NewMHDState sc = mms_state(tg, gc, t), sf = mms_state(tg, gf, t);
    const VectorField* fc[3] = {&sc.u, &sc.A, &sc.W};
    const VectorField* ff[3] = {&sf.u, &sf.A, &sf.W};
    for (int f = 0; f < 3; ++f) {
        const double scale = max_coeff(*ff[f]);
        if (scale == 0.0) continue;
        for (std::size_t i = 0; i < gc->nmodes(); ++i) {
            const int m0 = gc->m(0, i), m1 = gc->m(1, i), m2 = gc->m(2, i);
            if (2 * std::abs(m0) >= n_coarse || 2 * std::abs(m1) >= n_coarse || 2 * std::abs(m2) >= n_coarse) continue;
            auto wrap = [](int m, int n) { return m < 0 ? m + n : m; };
            const std::size_t j = gf->mode_index(wrap(m0, 2 * n_fine), wrap(m1, 2 * n_fine), m2);
            for (int d = 0; d < 3; ++d)
                if (std::abs(fc[f]->c[d][i] - ff[f]->c[d][j]) > tol * scale)
                    throw ArgumentError("manufactured fields not band-limited on the coarsest grid");
        }
    }
}

inline double mms_solve(const MmsTarget& tg, const MmsConfig& cfg, int n, double dt) {
    const GridPtr g = make_grid(3, n);
    NewMHDSystem sys{cfg.params, mms_forcing(tg, cfg.params), ModelOptions{cfg.dealias, true}};
    NewMHDState s = mms_state(tg, g, 0.0);
    if (cfg.dealias) apply_state_mask(s, dealias_mask(*g));
    const long steps = std::lround(cfg.t_end / dt);
    if (std::abs(steps * dt - cfg.t_end) > 1e-9 * cfg.t_end) throw ArgumentError("t_end is not a multiple of dt");
    for (long i = 0; i < steps; ++i) s = rk4_step(sys, s, dt);
    return mms_error(s, tg);
}

/// Inserts the target into the equations and measures convergence on the
/// dt ladder (fixed n_temporal) and on the resolution ladder (fixed dt_spatial).
inline MmsResult mms_run(const MmsTarget& tg, const MmsConfig& cfg) {
    int n_lo = cfg.n_temporal, n_hi = cfg.n_temporal;
    for (int n : cfg.n_ladder) {
        n_lo = std::min(n_lo, n);
        n_hi = std::max(n_hi, n);
    }
    check_band_limited(tg, n_lo, n_hi, 0.0, cfg.band_tolerance);

    MmsResult r;
    for (double dt : cfg.dt_ladder) r.dt_errors.push_back(mms_solve(tg, cfg, cfg.n_temporal, dt));
    for (std::size_t i = 0; i + 1 < r.dt_errors.size(); ++i)
        r.temporal_orders.push_back(std::log(r.dt_errors[i] / r.dt_errors[i + 1]) /
                                    std::log(cfg.dt_ladder[i] / cfg.dt_ladder[i + 1]));
    for (int n : cfg.n_ladder) r.n_errors.push_back(mms_solve(tg, cfg, n, cfg.dt_spatial));
    for (std::size_t i = 0; i + 1 < r.n_errors.size(); ++i) r.spatial_ratios.push_back(r.n_errors[i] / r.n_errors[i + 1]);
    return r;
}

}  // namespace nmhd::verify
