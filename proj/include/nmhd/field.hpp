/// @file field.hpp
/// @brief Spectral scalar/vector fields, transforms and quadrature.
///
/// Coefficients are expansion amplitudes: the forward transform divides by
/// the number of points, so the zero mode is the spatial mean. Norms and
/// inner products are integrals over the box (Parseval with the box volume).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nmhd/grid.hpp"

namespace nmhd {

/// Real samples on the grid (one array per component).
struct PhysicalField {
    std::vector<RealArray> comp;
};

struct ScalarField {
    GridPtr grid;
    CoeffArray c;

    ScalarField() = default;
    explicit ScalarField(GridPtr g) : grid(std::move(g)), c(grid->nmodes(), cplx{}) {}

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (auto& x : c) x *= s;
        return *this;
    }
};

/// Fourier coefficients of a real vector field with `dim` components.
struct VectorField {
    GridPtr grid;
    std::array<CoeffArray, 3> c;
    /// Set by operations whose output satisfies the solenoidal invariant.
    bool solenoidal_flag = false;

    VectorField() = default;
    explicit VectorField(GridPtr g) : grid(std::move(g)) {
        for (int d = 0; d < ncomp(); ++d) c[d].assign(grid->nmodes(), cplx{});
    }

    int ncomp() const { return grid ? grid->dim() : 0; }

    VectorField& operator+=(const VectorField& o) {
        for (int d = 0; d < ncomp(); ++d)
            for (std::size_t i = 0; i < c[d].size(); ++i) c[d][i] += o.c[d][i];
        solenoidal_flag = solenoidal_flag && o.solenoidal_flag;
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int d = 0; d < ncomp(); ++d)
            for (std::size_t i = 0; i < c[d].size(); ++i) c[d][i] -= o.c[d][i];
        solenoidal_flag = solenoidal_flag && o.solenoidal_flag;
        return *this;
    }
    VectorField& operator*=(double s) {
        for (int d = 0; d < ncomp(); ++d)
            for (auto& x : c[d]) x *= s;
        return *this;
    }
    /// this += s * o
    VectorField& add_scaled(const VectorField& o, double s) {
        for (int d = 0; d < ncomp(); ++d) {
            cplx* a = c[d].data();
            const cplx* b = o.c[d].data();
            const std::size_t m = c[d].size();
            for (std::size_t i = 0; i < m; ++i) a[i] += s * b[i];
        }
        solenoidal_flag = solenoidal_flag && o.solenoidal_flag;
        return *this;
    }
};

inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(double s, VectorField a) { return a *= s; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }

// ---------------------------------------------------------------------------
// Transforms

inline void check_samples(const SpectralGrid& g, std::size_t size) {
    if (size != g.npoints())
        throw ArgumentError("size mismatch: got " + std::to_string(size) + " samples, grid has " +
                            std::to_string(g.npoints()));
}

/// Physical samples -> coefficients (normalized by the point count).
inline ScalarField forward(const GridPtr& grid, std::span<const double> samples) {
    check_samples(*grid, samples.size());
    ScalarField out(grid);
    const double* src = samples.data();
    RealArray aligned;
    if (reinterpret_cast<std::uintptr_t>(src) % AlignedAllocator<double>::alignment != 0) {
        aligned.assign(samples.begin(), samples.end());
        src = aligned.data();
    }
    grid->fft_forward(src, out.c.data());
    const double scale = 1.0 / double(grid->npoints());
    for (auto& x : out.c) x *= scale;
    return out;
}

/// Coefficients -> physical samples.
inline RealArray inverse(const ScalarField& f) {
    const auto& g = *f.grid;
    if (f.c.size() != g.nmodes()) throw ArgumentError("size mismatch: coefficient array does not match grid");
    CoeffArray work(f.c.begin(), f.c.end());
    RealArray out(g.npoints());
    g.fft_inverse(work.data(), out.data());
    return out;
}

inline VectorField forward(const GridPtr& grid, const PhysicalField& p) {
    if (int(p.comp.size()) != grid->dim()) throw ArgumentError("size mismatch: component count");
    VectorField v(grid);
    for (int d = 0; d < grid->dim(); ++d) v.c[d] = forward(grid, p.comp[d]).c;
    return v;
}

inline RealArray inverse_component(const VectorField& v, int d) {
    const auto& g = *v.grid;
    CoeffArray work(v.c[d].begin(), v.c[d].end());
    RealArray out(g.npoints());
    g.fft_inverse(work.data(), out.data());
    return out;
}

inline PhysicalField inverse(const VectorField& v) {
    PhysicalField p;
    p.comp.resize(v.ncomp());
    for (int d = 0; d < v.ncomp(); ++d) p.comp[d] = inverse_component(v, d);
    return p;
}

/// Physical coordinates of every grid point.
inline std::array<RealArray, 3> coordinates(const SpectralGrid& g) {
    std::array<RealArray, 3> x;
    for (auto& a : x) a.assign(g.npoints(), 0.0);
    for (int i0 = 0; i0 < g.n(0); ++i0)
        for (int i1 = 0; i1 < g.n(1); ++i1)
            for (int i2 = 0; i2 < g.n(2); ++i2) {
                const std::size_t p = g.point_index(i0, i1, i2);
                x[0][p] = i0 * g.dx(0);
                x[1][p] = g.dim() > 1 ? i1 * g.dx(1) : 0.0;
                x[2][p] = g.dim() > 2 ? i2 * g.dx(2) : 0.0;
            }
    return x;
}

using PointFunction = std::function<double(double, double, double)>;
using VectorPointFunction = std::function<std::array<double, 3>(double, double, double)>;

/// Samples a closed-form scalar function and transforms it.
inline ScalarField sample(const GridPtr& grid, const PointFunction& f) {
    const auto x = coordinates(*grid);
    RealArray s(grid->npoints());
    for (std::size_t p = 0; p < s.size(); ++p) s[p] = f(x[0][p], x[1][p], x[2][p]);
    return forward(grid, s);
}

inline VectorField sample(const GridPtr& grid, const VectorPointFunction& f) {
    const auto x = coordinates(*grid);
    PhysicalField pf;
    pf.comp.assign(grid->dim(), RealArray(grid->npoints()));
    for (std::size_t p = 0; p < grid->npoints(); ++p) {
        const auto v = f(x[0][p], x[1][p], x[2][p]);
        for (int d = 0; d < grid->dim(); ++d) pf.comp[d][p] = v[d];
    }
    return forward(grid, pf);
}

// ---------------------------------------------------------------------------
// Quadrature (Parseval)

inline double inner(const SpectralGrid& g, const CoeffArray& a, const CoeffArray& b) {
    const auto& w = g.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    return g.volume() * s;
}

inline double inner(const ScalarField& a, const ScalarField& b) { return inner(*a.grid, a.c, b.c); }

inline double inner(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int d = 0; d < a.ncomp(); ++d) s += inner(*a.grid, a.c[d], b.c[d]);
    return s;
}

inline double norm_sq(const ScalarField& a) { return inner(a, a); }
inline double norm_sq(const VectorField& a) { return inner(a, a); }
inline double norm(const ScalarField& a) { return std::sqrt(norm_sq(a)); }
inline double norm(const VectorField& a) { return std::sqrt(norm_sq(a)); }

/// ||grad a||^2 = -<Lap a, a>, computed with the Laplacian symbol |k|^2.
inline double grad_norm_sq(const VectorField& a) {
    const auto& g = *a.grid;
    const auto& w = g.weights();
    const auto& k2 = g.ksq();
    double s = 0.0;
    for (int d = 0; d < a.ncomp(); ++d)
        for (std::size_t i = 0; i < g.nmodes(); ++i) s += w[i] * k2[i] * std::norm(a.c[d][i]);
    return g.volume() * s;
}

/// Physical-space L2 norm by midpoint quadrature of the samples.
inline double physical_norm(const VectorField& a) {
    const auto p = inverse(a);
    double s = 0.0;
    for (const auto& comp : p.comp)
        for (double x : comp) s += x * x;
    return std::sqrt(s * a.grid->volume() / double(a.grid->npoints()));
}

/// Max over grid points of the pointwise magnitude.
inline double sup_norm(const VectorField& a) {
    const auto p = inverse(a);
    double m = 0.0;
    for (std::size_t i = 0; i < a.grid->npoints(); ++i) {
        double s = 0.0;
        for (const auto& comp : p.comp) s += comp[i] * comp[i];
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

/// Largest coefficient magnitude over modes and components.
inline double max_coeff(const VectorField& a) {
    double m = 0.0;
    for (int d = 0; d < a.ncomp(); ++d)
        for (const auto& x : a.c[d]) m = std::max(m, std::abs(x));
    return m;
}

/// Max over conjugate pairs stored on the self-conjugate planes of
/// |c(-k) - conj(c(k))|. Zero for fields that are real in physical space.
inline double hermitian_defect(const SpectralGrid& g, const CoeffArray& c) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        if (!g.on_self_conjugate_plane(i)) continue;
        const std::size_t j = g.conjugate_index(i);
        m = std::max(m, std::abs(c[j] - std::conj(c[i])));
    }
    return m;
}

inline double hermitian_defect(const VectorField& v) {
    double m = 0.0;
    for (int d = 0; d < v.ncomp(); ++d) m = std::max(m, hermitian_defect(*v.grid, v.c[d]));
    return m;
}

/// Projects coefficients onto the Hermitian-symmetric subspace.
inline void enforce_hermitian(const SpectralGrid& g, CoeffArray& c) {
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        if (!g.on_self_conjugate_plane(i)) continue;
        const std::size_t j = g.conjugate_index(i);
        if (j < i) continue;
        if (j == i) {
            c[i] = cplx(c[i].real(), 0.0);
        } else {
            const cplx avg = 0.5 * (c[i] + std::conj(c[j]));
            c[i] = avg;
            c[j] = std::conj(avg);
        }
    }
}

inline void enforce_hermitian(VectorField& v) {
    for (int d = 0; d < v.ncomp(); ++d) enforce_hermitian(*v.grid, v.c[d]);
}

inline bool all_finite(const VectorField& v) {
    for (int d = 0; d < v.ncomp(); ++d)
        for (const auto& x : v.c[d])
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

}  // namespace nmhd
