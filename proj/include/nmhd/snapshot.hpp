/// @file snapshot.hpp
/// @brief "NMHD" binary field snapshots.
///
/// Little-endian layout:
///   magic "NMHD" | version u32 = 1 | model u32 (0 new, 1 classical) | dim u32
///   | n u32 x3 (unused axes 1) | box_length f64 x3 | time f64 | params f64 x5
///   | physical-space components f64, last axis fastest: u, A, W (classical u, H)
///
/// params are (nu, rho0, rho_e, eps0, mu0) for the new model and
/// (nu, mu, rho0, mu0, 0) for the classical one. 2D fields store two
/// components each.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nmhd/model_classical.hpp"

namespace nmhd {

inline constexpr std::uint32_t snapshot_version = 1;

struct SnapshotHeader {
    std::uint32_t version = snapshot_version;
    std::uint32_t model = 0;
    std::uint32_t dim = 3;
    std::array<std::uint32_t, 3> n{1, 1, 1};
    std::array<double, 3> box_length{1.0, 1.0, 1.0};
    double time = 0.0;
    std::array<double, 5> params{};

    std::size_t nfields() const { return model == 0 ? 3 : 2; }
    std::size_t npoints() const { return std::size_t(n[0]) * n[1] * n[2]; }
    std::size_t payload_doubles() const { return nfields() * dim * npoints(); }
};

inline constexpr std::size_t snapshot_header_bytes = 4 + 4 * 6 + 8 * (3 + 1 + 5);

struct Snapshot {
    SnapshotHeader header;
    GridPtr grid;
    std::optional<NewMHDState> state;
    std::optional<ClassicalState> classical_state;
    PhysParams params;
    ClassicalParams classical_params;
};

namespace detail {

class LeWriter {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(char((v >> (8 * i)) & 0xff));
    }
    void f64(double d) {
        const auto v = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) buf_.push_back(char((v >> (8 * i)) & 0xff));
    }
    void bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
    const std::vector<char>& data() const { return buf_; }

private:
    std::vector<char> buf_;
};

class LeReader {
public:
    LeReader(const char* p, std::size_t n) : p_(p), n_(n) {}
    bool has(std::size_t bytes) const { return pos_ + bytes <= n_; }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(p_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    double f64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(p_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }
    std::size_t remaining() const { return n_ - pos_; }

private:
    const char* p_;
    std::size_t n_;
    std::size_t pos_ = 0;
};

inline void write_header(LeWriter& w, const SnapshotHeader& h) {
    w.bytes("NMHD", 4);
    w.u32(h.version);
    w.u32(h.model);
    w.u32(h.dim);
    for (auto v : h.n) w.u32(v);
    for (auto v : h.box_length) w.f64(v);
    w.f64(h.time);
    for (auto v : h.params) w.f64(v);
}

inline SnapshotHeader header_for(const SpectralGrid& g, std::uint32_t model, double t) {
    SnapshotHeader h;
    h.model = model;
    h.dim = std::uint32_t(g.dim());
    for (int d = 0; d < 3; ++d) {
        h.n[d] = d < g.dim() ? std::uint32_t(g.n(d)) : 1u;
        h.box_length[d] = d < g.dim() ? g.length(d) : 1.0;
    }
    h.time = t;
    return h;
}

inline void write_fields(LeWriter& w, std::initializer_list<const VectorField*> fields) {
    for (const VectorField* f : fields)
        for (int d = 0; d < f->ncomp(); ++d)
            for (double x : inverse_component(*f, d)) w.f64(x);
}

inline void write_file(const std::string& path, const std::vector<char>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError(SnapshotError::Kind::io, "cannot open " + path + " for writing");
    out.write(data.data(), std::streamsize(data.size()));
    if (!out) throw SnapshotError(SnapshotError::Kind::io, "write failed: " + path);
}

inline std::vector<char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError(SnapshotError::Kind::io, "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

inline void write_snapshot(const NewMHDState& s, const PhysParams& p, const std::string& path) {
    detail::LeWriter w;
    SnapshotHeader h = detail::header_for(*s.u.grid, 0, s.t);
    h.params = {p.nu, p.rho0, p.rho_e, p.eps0, p.mu0};
    detail::write_header(w, h);
    detail::write_fields(w, {&s.u, &s.A, &s.W});
    detail::write_file(path, w.data());
}

inline void write_snapshot(const ClassicalState& s, const ClassicalParams& p, const std::string& path) {
    detail::LeWriter w;
    SnapshotHeader h = detail::header_for(*s.u.grid, 1, s.t);
    h.params = {p.nu, p.mu_resistivity, p.rho0, p.mu0, 0.0};
    detail::write_header(w, h);
    detail::write_fields(w, {&s.u, &s.H});
    detail::write_file(path, w.data());
}

/// Parses and validates the fixed-size header of an in-memory snapshot.
inline SnapshotHeader parse_snapshot_header(const std::vector<char>& data) {
    using K = SnapshotError::Kind;
    if (data.size() < 4 || std::memcmp(data.data(), "NMHD", 4) != 0)
        throw SnapshotError(K::bad_magic, "bad magic: not an NMHD snapshot");
    if (data.size() < 8) throw SnapshotError(K::truncated_payload, "truncated payload: header");
    detail::LeReader r(data.data() + 4, data.size() - 4);
    SnapshotHeader h;
    h.version = r.u32();
    if (h.version != snapshot_version)
        throw SnapshotError(K::version_mismatch, "version mismatch: file has " + std::to_string(h.version) +
                                                     ", expected " + std::to_string(snapshot_version));
    if (data.size() < snapshot_header_bytes) throw SnapshotError(K::truncated_payload, "truncated payload: header");
    h.model = r.u32();
    h.dim = r.u32();
    for (auto& v : h.n) v = r.u32();
    for (auto& v : h.box_length) v = r.f64();
    h.time = r.f64();
    for (auto& v : h.params) v = r.f64();
    if (h.model > 1) throw SnapshotError(K::malformed, "malformed header: unknown model " + std::to_string(h.model));
    if (h.dim != 2 && h.dim != 3) throw SnapshotError(K::malformed, "malformed header: dim " + std::to_string(h.dim));
    for (std::uint32_t d = h.dim; d < 3; ++d)
        if (h.n[d] != 1) throw SnapshotError(K::malformed, "malformed header: unused axis with n != 1");
    return h;
}

inline SnapshotHeader read_snapshot_header(const std::string& path) {
    return parse_snapshot_header(detail::read_file(path));
}

inline Snapshot read_snapshot(const std::string& path) {
    using K = SnapshotError::Kind;
    const std::vector<char> data = detail::read_file(path);
    Snapshot snap;
    snap.header = parse_snapshot_header(data);
    const SnapshotHeader& h = snap.header;

    const std::size_t need = snapshot_header_bytes + 8 * h.payload_doubles();
    if (data.size() < need)
        throw SnapshotError(K::truncated_payload, "truncated payload: expected " + std::to_string(need) + " bytes, found " +
                                                      std::to_string(data.size()));
    if (data.size() > need) throw SnapshotError(K::malformed, "malformed snapshot: trailing bytes");

    std::vector<int> n(h.dim);
    std::vector<double> len(h.dim);
    for (std::uint32_t d = 0; d < h.dim; ++d) {
        n[d] = int(h.n[d]);
        len[d] = h.box_length[d];
    }
    try {
        snap.grid = make_grid(int(h.dim), n, len);
    } catch (const ArgumentError& e) {
        throw SnapshotError(K::malformed, std::string("malformed header: ") + e.what());
    }

    detail::LeReader r(data.data() + snapshot_header_bytes, data.size() - snapshot_header_bytes);
    auto read_field = [&]() {
        PhysicalField p;
        p.comp.resize(h.dim);
        for (auto& c : p.comp) {
            c.resize(h.npoints());
            for (double& x : c) x = r.f64();
        }
        VectorField v = forward(snap.grid, p);
        v.solenoidal_flag = is_solenoidal(v);
        return v;
    };
    if (h.model == 0) {
        NewMHDState s;
        s.t = h.time;
        s.u = read_field();
        s.A = read_field();
        s.W = read_field();
        snap.state = std::move(s);
        snap.params = {h.params[0], h.params[1], h.params[2], h.params[3], h.params[4]};
    } else {
        ClassicalState s;
        s.t = h.time;
        s.u = read_field();
        s.H = read_field();
        snap.classical_state = std::move(s);
        snap.classical_params = {h.params[0], h.params[1], h.params[2], h.params[3]};
    }
    return snap;
}

}  // namespace nmhd
