/// @file pseudo.hpp
/// @brief Pseudo-spectral quadratic products shared by both models.
#pragma once

#include "nmhd/spectral.hpp"

namespace nmhd::pseudo {

/// Forward transform of the pointwise product a*b.
inline CoeffArray product(const GridPtr& g, const RealArray& a, const RealArray& b) {
    RealArray p(g->npoints());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = a[i] * b[i];
    return forward(g, p).c;
}

/// div(a (x) b)_i = d_j (a_j b_i); equals (a.grad) b when div a = 0.
/// `symmetric` reuses a_j b_i = a_i b_j when a and b are the same field.
inline VectorField divergence_of_outer(const GridPtr& g, const PhysicalField& a, const PhysicalField& b,
                                       bool symmetric) {
    const int dim = g->dim();
    VectorField out(g);
    CoeffArray t[3][3];
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if (symmetric && j < i) {
                t[i][j] = t[j][i];
                continue;
            }
            t[i][j] = product(g, a.comp[j], b.comp[i]);  // a_j b_i
        }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const auto& k = g->kd(j);
            for (std::size_t m = 0; m < g->nmodes(); ++m) out.c[i][m] += detail::I * k[m] * t[i][j][m];
        }
    return out;
}

/// Pointwise cross product a x b, with 2D fields embedded in the plane.
/// In 2D `b` is the out-of-plane scalar (single component).
inline VectorField cross(const GridPtr& g, const PhysicalField& a, const PhysicalField& b) {
    VectorField out(g);
    const std::size_t n = g->npoints();
    if (g->dim() == 3) {
        RealArray r(n);
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            for (std::size_t p = 0; p < n; ++p) r[p] = a.comp[j][p] * b.comp[k][p] - a.comp[k][p] * b.comp[j][p];
            out.c[i] = forward(g, r).c;
        }
    } else {
        // (a1, a2, 0) x (0, 0, s) = (a2 s, -a1 s, 0)
        const auto& s = b.comp[0];
        RealArray r(n);
        for (std::size_t p = 0; p < n; ++p) r[p] = a.comp[1][p] * s[p];
        out.c[0] = forward(g, r).c;
        for (std::size_t p = 0; p < n; ++p) r[p] = -a.comp[0][p] * s[p];
        out.c[1] = forward(g, r).c;
    }
    return out;
}

/// Curl of a spectral field evaluated in physical space: three components in
/// 3D, the out-of-plane scalar in 2D.
inline PhysicalField curl_physical(const VectorField& v) {
    PhysicalField p;
    if (v.grid->dim() == 3) {
        p = inverse(curl(v));
    } else {
        p.comp.push_back(inverse(curl_scalar(v)));
    }
    return p;
}

}  // namespace nmhd::pseudo
