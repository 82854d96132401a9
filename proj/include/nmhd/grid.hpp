/// @file grid.hpp
/// @brief Periodic box geometry, wavenumber tables and FFTW plans.
///
/// Physical samples are stored row-major with the last active axis fastest.
/// Spectral coefficients use the real-to-complex half spectrum: the last
/// active axis holds indices 0..n/2 only, the conjugate half is implied.
/// A 2D grid is stored as n0 x n1 (x 1); a 3D grid as n0 x n1 x n2.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <new>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "nmhd/error.hpp"

namespace nmhd {

using cplx = std::complex<double>;

/// 64-byte aligned allocator so every array satisfies the alignment of the
/// FFTW plans (which are created on aligned scratch arrays).
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        std::size_t bytes = ((n * sizeof(T) + alignment - 1) / alignment) * alignment;
        if (bytes == 0) bytes = alignment;
        void* p = std::aligned_alloc(alignment, bytes);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { std::free(p); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using RealArray = std::vector<double, AlignedAllocator<double>>;
using CoeffArray = std::vector<cplx, AlignedAllocator<cplx>>;

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

class SpectralGrid;
using GridPtr = std::shared_ptr<const SpectralGrid>;

class SpectralGrid {
public:
    SpectralGrid(int dim, std::array<int, 3> n, std::array<double, 3> length)
        : dim_(dim), n_(n), length_(length) {
        for (int d = dim_; d < 3; ++d) {
            n_[d] = 1;
            length_[d] = 1.0;
        }
        for (int d = 0; d < 3; ++d) spec_[d] = n_[d];
        spec_[dim_ - 1] = n_[dim_ - 1] / 2 + 1;
        npoints_ = std::size_t(n_[0]) * n_[1] * n_[2];
        nmodes_ = std::size_t(spec_[0]) * spec_[1] * spec_[2];
        build_tables();
        build_plans();
    }

    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    ~SpectralGrid() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
    }

    int dim() const noexcept { return dim_; }
    int n(int axis) const { return n_[axis]; }
    double length(int axis) const { return length_[axis]; }
    const std::array<int, 3>& shape() const noexcept { return n_; }
    const std::array<double, 3>& lengths() const noexcept { return length_; }
    const std::array<int, 3>& spectral_shape() const noexcept { return spec_; }
    double dx(int axis) const { return length_[axis] / n_[axis]; }
    double min_dx() const {
        double h = dx(0);
        for (int d = 1; d < dim_; ++d) h = std::min(h, dx(d));
        return h;
    }
    double volume() const {
        double v = 1.0;
        for (int d = 0; d < dim_; ++d) v *= length_[d];
        return v;
    }
    std::size_t npoints() const noexcept { return npoints_; }
    std::size_t nmodes() const noexcept { return nmodes_; }
    int half_axis() const noexcept { return dim_ - 1; }

    std::size_t mode_index(int i0, int i1, int i2) const {
        return (std::size_t(i0) * spec_[1] + i1) * spec_[2] + i2;
    }
    std::size_t point_index(int i0, int i1, int i2) const {
        return (std::size_t(i0) * n_[1] + i1) * n_[2] + i2;
    }

    /// Signed integer wavenumber m_d of a stored mode, in {-n/2+1, ..., n/2}.
    int m(int axis, std::size_t mode) const { return mint_[axis][mode]; }
    /// Wavenumber used by odd derivatives (zero at the Nyquist index).
    double kd(int axis, std::size_t mode) const { return kd_[axis][mode]; }
    const std::vector<double>& kd(int axis) const { return kd_[axis]; }
    /// |k|^2 used by the Laplacian (Nyquist included).
    double ksq(std::size_t mode) const { return ksq_[mode]; }
    const std::vector<double>& ksq() const noexcept { return ksq_; }
    /// |kd|^2, the norm of the derivative wavevector.
    double kdsq(std::size_t mode) const { return kdsq_[mode]; }
    /// Multiplicity of a stored mode in the full spectrum (1 or 2).
    double weight(std::size_t mode) const { return weight_[mode]; }
    const std::vector<double>& weights() const noexcept { return weight_; }
    /// 2/3-rule mask: 1 where |m_j| <= floor(n_j/3) on every active axis.
    const std::vector<unsigned char>& dealias_keep() const noexcept { return keep_; }
    /// Physical wavenumber 2*pi*m/L for integer index m along an axis.
    double wavenumber(int axis, int m) const {
        return 2.0 * std::numbers::pi * m / length_[axis];
    }

    /// Stored index of the conjugate partner -m (only meaningful for modes on
    /// the half axis planes 0 and n/2, where both members are stored).
    std::size_t conjugate_index(std::size_t mode) const {
        std::array<int, 3> idx{};
        for (int d = 0; d < 3; ++d) {
            int mm = -mint_[d][mode];
            if (d == half_axis()) {
                idx[d] = mint_[d][mode];  // 0 or n/2 maps to itself
            } else {
                idx[d] = mm < 0 ? mm + n_[d] : mm;
                if (n_[d] > 1 && std::abs(mint_[d][mode]) * 2 == n_[d]) idx[d] = mint_[d][mode];
            }
        }
        return mode_index(idx[0], idx[1], idx[2]);
    }

    /// True if the mode lies on a half-axis plane whose conjugate is stored.
    bool on_self_conjugate_plane(std::size_t mode) const {
        const int mh = mint_[half_axis()][mode];
        return mh == 0 || 2 * mh == n_[half_axis()];
    }

    /// Unnormalized r2c transform; caller scales by 1/npoints.
    void fft_forward(const double* in, cplx* out) const {
        fftw_execute_dft_r2c(forward_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
    }
    /// Unnormalized c2r transform; destroys `in`.
    void fft_inverse(cplx* in, double* out) const {
        fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(in), out);
    }

private:
    void build_tables() {
        for (int d = 0; d < 3; ++d) {
            mint_[d].resize(nmodes_);
            kd_[d].resize(nmodes_);
        }
        ksq_.resize(nmodes_);
        kdsq_.resize(nmodes_);
        weight_.resize(nmodes_);
        keep_.assign(nmodes_, 1);
        const int h = half_axis();
        for (int i0 = 0; i0 < spec_[0]; ++i0)
            for (int i1 = 0; i1 < spec_[1]; ++i1)
                for (int i2 = 0; i2 < spec_[2]; ++i2) {
                    const std::size_t k = mode_index(i0, i1, i2);
                    const std::array<int, 3> idx{i0, i1, i2};
                    double ks = 0.0, kds = 0.0;
                    for (int d = 0; d < 3; ++d) {
                        int mm = 0;
                        if (d < dim_) mm = (d == h || idx[d] <= n_[d] / 2) ? idx[d] : idx[d] - n_[d];
                        mint_[d][k] = mm;
                        const double kk = d < dim_ ? wavenumber(d, mm) : 0.0;
                        const bool nyquist = d < dim_ && 2 * mm == n_[d];
                        kd_[d][k] = nyquist ? 0.0 : kk;
                        if (d < dim_ && std::abs(mm) > n_[d] / 3) keep_[k] = 0;
                        ks += kk * kk;
                        kds += kd_[d][k] * kd_[d][k];
                    }
                    ksq_[k] = ks;
                    kdsq_[k] = kds;
                    const int mh = idx[h];
                    weight_[k] = (mh == 0 || 2 * mh == n_[h]) ? 1.0 : 2.0;
                }
    }

    void build_plans() {
        RealArray r(npoints_);
        CoeffArray c(nmodes_);
        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* cp = reinterpret_cast<fftw_complex*>(c.data());
        forward_ = fftw_plan_dft_r2c(dim_, n_.data(), r.data(), cp, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r(dim_, n_.data(), cp, r.data(), FFTW_ESTIMATE);
        if (!forward_ || !inverse_) throw Error("FFTW plan creation failed");
    }

    int dim_;
    std::array<int, 3> n_;
    std::array<double, 3> length_;
    std::array<int, 3> spec_{};
    std::size_t npoints_ = 0;
    std::size_t nmodes_ = 0;
    std::array<std::vector<int>, 3> mint_;
    std::array<std::vector<double>, 3> kd_;
    std::vector<double> ksq_;
    std::vector<double> kdsq_;
    std::vector<double> weight_;
    std::vector<unsigned char> keep_;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

/// Validates the resolution and builds a shared grid.
inline GridPtr make_grid(int dim, std::span<const int> n, std::span<const double> box_length) {
    if (dim != 2 && dim != 3) throw ArgumentError("dim must be 2 or 3, got " + std::to_string(dim));
    if (n.size() != std::size_t(dim) || box_length.size() != std::size_t(dim))
        throw ArgumentError("expected " + std::to_string(dim) + " resolutions and box lengths");
    std::array<int, 3> nn{1, 1, 1};
    std::array<double, 3> ll{1.0, 1.0, 1.0};
    for (int d = 0; d < dim; ++d) {
        if (n[d] % 2 != 0) throw ArgumentError("odd resolution " + std::to_string(n[d]) + " on axis " + std::to_string(d));
        if (n[d] < 4) throw ArgumentError("resolution must be >= 4 on axis " + std::to_string(d));
        if (!(box_length[d] > 0.0) || !std::isfinite(box_length[d]))
            throw ArgumentError("box length must be positive on axis " + std::to_string(d));
        nn[d] = n[d];
        ll[d] = box_length[d];
    }
    return std::make_shared<const SpectralGrid>(dim, nn, ll);
}

inline GridPtr make_grid(int dim, std::initializer_list<int> n, std::initializer_list<double> box_length) {
    return make_grid(dim, std::span<const int>(n.begin(), n.size()),
                     std::span<const double>(box_length.begin(), box_length.size()));
}

/// Cubic/square grid of side 2*pi.
inline GridPtr make_grid(int dim, int n) {
    std::vector<int> nn(dim, n);
    std::vector<double> ll(dim, 2.0 * std::numbers::pi);
    return make_grid(dim, nn, ll);
}

}  // namespace nmhd
