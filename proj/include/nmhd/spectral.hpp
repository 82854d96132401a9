/// @file spectral.hpp
/// @brief Mode-wise differential operators, Leray projection and dealiasing.
#pragma once

#include <string_view>
#include <variant>

#include "nmhd/field.hpp"

namespace nmhd {

namespace detail {
inline constexpr cplx I{0.0, 1.0};

inline void require_same_grid(const VectorField& a, const VectorField& b) {
    if (a.grid != b.grid) throw ArgumentError("fields live on different grids");
}
}  // namespace detail

inline VectorField gradient(const ScalarField& f) {
    const auto& g = *f.grid;
    VectorField out(f.grid);
    for (int d = 0; d < g.dim(); ++d) {
        const auto& k = g.kd(d);
        for (std::size_t i = 0; i < g.nmodes(); ++i) out.c[d][i] = detail::I * k[i] * f.c[i];
    }
    return out;
}

inline ScalarField divergence(const VectorField& v) {
    const auto& g = *v.grid;
    ScalarField out(v.grid);
    for (int d = 0; d < g.dim(); ++d) {
        const auto& k = g.kd(d);
        for (std::size_t i = 0; i < g.nmodes(); ++i) out.c[i] += detail::I * k[i] * v.c[d][i];
    }
    return out;
}

/// 3D curl.
inline VectorField curl(const VectorField& v) {
    const auto& g = *v.grid;
    if (g.dim() != 3) throw ArgumentError("curl3 requires dim=3");
    VectorField out(v.grid);
    const auto &k0 = g.kd(0), &k1 = g.kd(1), &k2 = g.kd(2);
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        out.c[0][i] = detail::I * (k1[i] * v.c[2][i] - k2[i] * v.c[1][i]);
        out.c[1][i] = detail::I * (k2[i] * v.c[0][i] - k0[i] * v.c[2][i]);
        out.c[2][i] = detail::I * (k0[i] * v.c[1][i] - k1[i] * v.c[0][i]);
    }
    out.solenoidal_flag = true;
    return out;
}

/// 2D scalar curl: d u2/dx1 - d u1/dx2.
inline ScalarField curl_scalar(const VectorField& v) {
    const auto& g = *v.grid;
    if (g.dim() != 2) throw ArgumentError("curl2_scalar requires dim=2");
    ScalarField out(v.grid);
    const auto &k0 = g.kd(0), &k1 = g.kd(1);
    for (std::size_t i = 0; i < g.nmodes(); ++i) out.c[i] = detail::I * (k0[i] * v.c[1][i] - k1[i] * v.c[0][i]);
    return out;
}

/// 2D vector curl of a scalar: (d psi/dx2, -d psi/dx1).
inline VectorField curl_vector(const ScalarField& psi) {
    const auto& g = *psi.grid;
    if (g.dim() != 2) throw ArgumentError("curl2_vector requires dim=2");
    VectorField out(psi.grid);
    const auto &k0 = g.kd(0), &k1 = g.kd(1);
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        out.c[0][i] = detail::I * k1[i] * psi.c[i];
        out.c[1][i] = -detail::I * k0[i] * psi.c[i];
    }
    out.solenoidal_flag = true;
    return out;
}

inline ScalarField laplacian(const ScalarField& f) {
    ScalarField out(f.grid);
    const auto& k2 = f.grid->ksq();
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = -k2[i] * f.c[i];
    return out;
}

inline VectorField laplacian(const VectorField& v) {
    VectorField out(v.grid);
    const auto& k2 = v.grid->ksq();
    for (int d = 0; d < v.ncomp(); ++d)
        for (std::size_t i = 0; i < k2.size(); ++i) out.c[d][i] = -k2[i] * v.c[d][i];
    out.solenoidal_flag = v.solenoidal_flag;
    return out;
}

enum class DiffKind { gradient, divergence, curl3, curl2_scalar, curl2_vector, laplacian };

inline DiffKind parse_diff_kind(std::string_view s) {
    if (s == "gradient") return DiffKind::gradient;
    if (s == "divergence") return DiffKind::divergence;
    if (s == "curl3") return DiffKind::curl3;
    if (s == "curl2_scalar") return DiffKind::curl2_scalar;
    if (s == "curl2_vector") return DiffKind::curl2_vector;
    if (s == "laplacian") return DiffKind::laplacian;
    throw ArgumentError("unknown differential operator '" + std::string(s) + "'");
}

/// Dispatching form for vector inputs; throws on kind/arity mismatch.
inline std::variant<ScalarField, VectorField> spectral_diff(const VectorField& v, DiffKind kind) {
    switch (kind) {
        case DiffKind::divergence: return divergence(v);
        case DiffKind::curl3: return curl(v);
        case DiffKind::curl2_scalar: return curl_scalar(v);
        case DiffKind::laplacian: return laplacian(v);
        default: throw ArgumentError("operator not defined for vector fields");
    }
}

inline std::variant<ScalarField, VectorField> spectral_diff(const ScalarField& f, DiffKind kind) {
    switch (kind) {
        case DiffKind::gradient: return gradient(f);
        case DiffKind::curl2_vector: return curl_vector(f);
        case DiffKind::laplacian: return laplacian(f);
        default: throw ArgumentError("operator not defined for scalar fields");
    }
}

// ---------------------------------------------------------------------------

/// In-place Leray projection u <- u - k (k.u)/|k|^2. The zero mode (and any
/// mode whose derivative wavevector vanishes) is left unchanged.
inline void leray_project_inplace(VectorField& v) {
    const auto& g = *v.grid;
    const int dim = g.dim();
    const double* k[3] = {g.kd(0).data(), dim > 1 ? g.kd(1).data() : nullptr, dim > 2 ? g.kd(2).data() : nullptr};
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        const double kk = g.kdsq(i);
        if (kk == 0.0) continue;
        cplx dot{};
        for (int d = 0; d < dim; ++d) dot += k[d][i] * v.c[d][i];
        const cplx s = dot / kk;
        for (int d = 0; d < dim; ++d) v.c[d][i] -= k[d][i] * s;
    }
    v.solenoidal_flag = true;
}

inline VectorField leray_project(VectorField v) {
    leray_project_inplace(v);
    return v;
}

/// Gradient part (I - P) v.
inline VectorField gradient_part(const VectorField& v) {
    VectorField out = v;
    out -= leray_project(v);
    out.solenoidal_flag = false;
    return out;
}

/// Max over modes of |k . v(k)|.
inline double divergence_max(const VectorField& v) {
    const auto& g = *v.grid;
    double m = 0.0;
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        cplx dot{};
        for (int d = 0; d < g.dim(); ++d) dot += g.kd(d, i) * v.c[d][i];
        m = std::max(m, std::abs(dot));
    }
    return m;
}

/// Solenoidal invariant: max |k.v| <= 1e-12 (||v|| + 1e-30).
inline bool is_solenoidal(const VectorField& v, double rel_tol = 1e-12) {
    return divergence_max(v) <= rel_tol * (norm(v) + 1e-30);
}

// ---------------------------------------------------------------------------
// Mode masks

/// One byte per stored mode; 1 keeps the coefficient.
using ModeMask = std::vector<unsigned char>;

/// 2/3 rule: keep |m_j| <= floor(n_j/3) on every active axis.
inline const ModeMask& dealias_mask(const SpectralGrid& g) { return g.dealias_keep(); }

inline void apply_mask(CoeffArray& c, const ModeMask& mask) {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!mask[i]) c[i] = cplx{};
}

inline void apply_mask(VectorField& v, const ModeMask& mask) {
    for (int d = 0; d < v.ncomp(); ++d) apply_mask(v.c[d], mask);
}

inline void dealias_inplace(VectorField& v) { apply_mask(v, dealias_mask(*v.grid)); }
inline void dealias_inplace(ScalarField& f) { apply_mask(f.c, dealias_mask(*f.grid)); }

inline VectorField dealias(VectorField v) {
    dealias_inplace(v);
    return v;
}
inline ScalarField dealias(ScalarField f) {
    dealias_inplace(f);
    return f;
}

}  // namespace nmhd
