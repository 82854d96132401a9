#pragma once

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nmhd/nmhd.hpp"

namespace nmhd::test {

using V3 = std::array<double, 3>;

inline double max_abs(const CoeffArray& a) {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    return m;
}

/// Max coefficient distance between two vector fields on the same grid.
inline double max_diff(const VectorField& a, const VectorField& b) {
    double m = 0.0;
    for (int d = 0; d < a.ncomp(); ++d)
        for (std::size_t i = 0; i < a.c[d].size(); ++i) m = std::max(m, std::abs(a.c[d][i] - b.c[d][i]));
    return m;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i) m = std::max(m, std::abs(a.c[i] - b.c[i]));
    return m;
}

inline VectorField vec(const GridPtr& g, VectorPointFunction f) { return sample(g, f); }

/// Random solenoidal field on |m| <= kmax, not normalized to any energy.
inline VectorField smooth_random(const GridPtr& g, std::uint64_t seed, double energy = 1.0, double kmax = 3.0) {
    return random_solenoidal(g, seed, energy, kmax, 0.0, true);
}

inline NewMHDState random_state(const GridPtr& g, std::uint64_t seed) {
    NewMHDState s;
    s.u = smooth_random(g, seed, 0.5);
    s.A = smooth_random(g, seed + 1, 0.5);
    s.W = smooth_random(g, seed + 2, 0.25);
    return s;
}

}  // namespace nmhd::test
