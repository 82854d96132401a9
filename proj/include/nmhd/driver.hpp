/// @file driver.hpp
/// @brief Builds runs from a RunConfig: initial data, forcing, the time
///        loop with diagnostics, snapshots, model comparison and the
///        Galerkin sequence.
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <random>

#include "nmhd/config.hpp"
#include "nmhd/csv.hpp"
#include "nmhd/galerkin.hpp"
#include "nmhd/snapshot.hpp"
#include "nmhd/verify.hpp"

namespace nmhd {

inline const std::vector<std::string>& diagnostics_columns() {
    static const std::vector<std::string> cols{
        "t",           "E_kin",        "E_wave",    "E_grad",          "dissipation",
        "work_f",      "coupling",     "residual_u", "residual_A",     "div_u_max",
        "div_A_max",   "phi_grad_max", "bound_lhs", "bound_rhs_paper", "bound_rhs_derived"};
    return cols;
}

inline std::vector<double> diagnostics_row(const EnergyReport& r, const BoundReport& b) {
    return {r.t,          r.E_kin,      r.E_wave,    r.E_grad,       r.dissipation,
            r.work_f,     r.coupling,   r.residual_u, r.residual_A,  r.div_u_max,
            r.div_A_max,  r.phi_grad_max, b.lhs,      b.rhs_paper,   b.rhs_derived};
}

// ---------------------------------------------------------------------------
// Initial data and forcing

/// Seeded random field on modes 0 < |m| <= peak_mode with amplitude
/// exp(-decay |m|), Hermitian, Leray-projected, optionally 2/3-truncated,
/// rescaled to 1/2 ||u||^2 = energy.
inline VectorField random_solenoidal(const GridPtr& grid, std::uint64_t seed, double energy, double peak_mode,
                                     double decay = 0.0, bool dealias_field = true) {
    const auto& g = *grid;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorField v(grid);
    for (std::size_t i = 0; i < g.nmodes(); ++i) {
        double msq = 0.0;
        for (int d = 0; d < g.dim(); ++d) msq += double(g.m(d, i)) * g.m(d, i);
        const double mag = std::sqrt(msq);
        const bool active = msq > 0.0 && mag <= peak_mode;
        for (int d = 0; d < g.dim(); ++d) {
            // Draw for every mode so the sequence does not depend on peak_mode.
            const double re = normal(rng), im = normal(rng);
            if (active) v.c[d][i] = cplx{re, im} * std::exp(-decay * mag);
        }
    }
    enforce_hermitian(v);
    leray_project_inplace(v);
    if (dealias_field) dealias_inplace(v);
    const double e = 0.5 * norm_sq(v);
    if (e > 0.0) v *= std::sqrt(energy / e);
    v.solenoidal_flag = true;
    return v;
}

inline VectorField single_mode_field(const GridPtr& grid, const std::array<int, 3>& kvec,
                                     const std::array<double, 3>& evec, double amp) {
    const verify::WaveMode w{kvec, evec, amp};
    verify::check_polarization(*grid, w);
    const auto k = verify::physical_k(*grid, kvec);
    VectorField v = sample(grid, [&](double x, double y, double z) {
        const double s = amp * std::cos(k[0] * x + k[1] * y + k[2] * z);
        return std::array<double, 3>{s * evec[0], s * evec[1], s * evec[2]};
    });
    v.solenoidal_flag = true;
    return v;
}

inline VectorField build_field(const FieldSpec& f, const GridPtr& grid, bool dealias_field, const std::string& key) {
    try {
        if (f.type == "zero") {
            VectorField v(grid);
            v.solenoidal_flag = true;
            return v;
        }
        if (f.type == "taylor_green") {
            VectorField v = sample(grid, [](double x, double y, double) {
                return std::array<double, 3>{std::cos(x) * std::sin(y), -std::sin(x) * std::cos(y), 0.0};
            });
            v.solenoidal_flag = true;
            return v;
        }
        if (f.type == "wave_mode") return single_mode_field(grid, f.kvec, f.evec, f.amp);
        if (f.type == "random_solenoidal")
            return random_solenoidal(grid, f.seed, f.energy, f.peak_mode, f.decay, dealias_field);
    } catch (const ArgumentError& e) {
        throw ConfigError(key, e.what());
    }
    throw ConfigError(key + ".type", "unknown field type '" + f.type + "'");
}

namespace detail {
inline void check_snapshot_grid(const SpectralGrid& s, const SpectralGrid& g, const std::string& key) {
    bool same = s.dim() == g.dim();
    for (int d = 0; same && d < g.dim(); ++d)
        same = s.n(d) == g.n(d) && std::abs(s.length(d) - g.length(d)) <= 1e-12 * g.length(d);
    if (!same) throw ConfigError(key, "snapshot grid does not match the configured grid");
}
}  // namespace detail

inline NewMHDState build_initial_state(const RunConfig& c, const GridPtr& grid) {
    const InitialSpec& ic = c.initial;
    if (!ic.file.empty()) {
        Snapshot snap = read_snapshot(ic.file);
        detail::check_snapshot_grid(*snap.grid, *grid, "initial_condition.path");
        if (!snap.state) throw ConfigError("initial_condition.path", "snapshot holds a classical state");
        NewMHDState s = std::move(*snap.state);
        // Re-home onto the run's grid object.
        s.u.grid = s.A.grid = s.W.grid = grid;
        return s;
    }
    NewMHDState s;
    s.t = 0.0;
    s.u = build_field(ic.u, grid, c.dealias, "initial_condition.u");
    s.A = build_field(ic.A, grid, c.dealias, "initial_condition.A");
    s.W = build_field(ic.W, grid, c.dealias, "initial_condition.W");
    if (c.dealias) apply_state_mask(s, dealias_mask(*grid));
    return s;
}

/// Classical initial data: same velocity; H from its own spec or H = curl A (3D).
inline ClassicalState build_classical_initial_state(const RunConfig& c, const GridPtr& grid) {
    const InitialSpec& ic = c.initial;
    if (!ic.file.empty()) {
        Snapshot snap = read_snapshot(ic.file);
        detail::check_snapshot_grid(*snap.grid, *grid, "initial_condition.path");
        ClassicalState s;
        if (snap.classical_state) {
            s = std::move(*snap.classical_state);
        } else {
            if (grid->dim() != 3) throw ConfigError("initial_condition.H", "2D classical runs need an explicit H");
            s.u = snap.state->u;
            s.H = curl(snap.state->A);
            s.t = snap.state->t;
        }
        s.u.grid = s.H.grid = grid;
        return s;
    }
    ClassicalState s;
    s.u = build_field(ic.u, grid, c.dealias, "initial_condition.u");
    if (ic.H) {
        s.H = build_field(*ic.H, grid, c.dealias, "initial_condition.H");
    } else if (grid->dim() == 3) {
        s.H = curl(build_field(ic.A, grid, c.dealias, "initial_condition.A"));
    } else if (ic.A.type == "zero") {
        s.H = VectorField(grid);
    } else {
        throw ConfigError("initial_condition.H", "2D classical runs need an explicit H");
    }
    s.H.solenoidal_flag = true;
    if (c.dealias) apply_state_mask(s, dealias_mask(*grid));
    return s;
}

inline Forcing build_forcing(const RunConfig& c, const GridPtr& grid) {
    Forcing f;
    const ForcingSpec& fs = c.forcing;
    if (fs.type == "single_mode") {
        try {
            f.f = single_mode_field(grid, fs.kvec, fs.evec, fs.amp);
        } catch (const ArgumentError& e) {
            throw ConfigError("forcing", e.what());
        }
    } else if (fs.type == "file") {
        Snapshot snap = read_snapshot(fs.path);
        detail::check_snapshot_grid(*snap.grid, *grid, "forcing.path");
        f.f = snap.state ? snap.state->u : snap.classical_state->u;
        f.f.grid = grid;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Time loop

/// One evolving model with its diagnostics.
class Track {
public:
    virtual ~Track() = default;
    virtual double time() const = 0;
    virtual double stable_dt(double safety) const = 0;
    virtual void step(double dt) = 0;
    virtual EnergyReport report() const = 0;
    virtual BoundReport bound() const = 0;
    virtual void snapshot(const std::string& path) const = 0;
    virtual const VectorField& velocity() const = 0;
};

class NewTrack final : public Track {
public:
    NewTrack(NewMHDState s, PhysParams p, Forcing f, ModelOptions opt)
        : sys_{p, std::move(f), opt}, s_(std::move(s)) {
        norms_ = initial_norms(s_, s_, p, sys_.forcing.has_static() ? &sys_.forcing.f : nullptr);
    }
    double time() const override { return s_.t; }
    double stable_dt(double safety) const override { return nmhd::stable_dt(s_, sys_.params, *s_.u.grid, safety); }
    void step(double dt) override { s_ = rk4_step(sys_, s_, dt); }
    EnergyReport report() const override { return energy_report(s_, sys_.params, sys_.forcing); }
    BoundReport bound() const override { return bound_at(norm_sample(s_), sys_.params, norms_); }
    void snapshot(const std::string& path) const override { write_snapshot(s_, sys_.params, path); }
    const VectorField& velocity() const override { return s_.u; }
    const NewMHDState& state() const { return s_; }

private:
    NewMHDSystem sys_;
    NewMHDState s_;
    InitialNorms norms_;
};

class ClassicalTrack final : public Track {
public:
    ClassicalTrack(ClassicalState s, ClassicalParams p, VectorField f, ModelOptions opt)
        : sys_{p, std::move(f), opt}, s_(std::move(s)) {
        energy0_ = norm_sq(s_.u) + p.lorentz_coefficient() * norm_sq(s_.H);
        f_norm_ = sys_.f.grid ? norm(sys_.f) : 0.0;
    }
    double time() const override { return s_.t; }
    double stable_dt(double safety) const override { return nmhd::stable_dt(s_, sys_.params, *s_.u.grid, safety); }
    void step(double dt) override { s_ = rk4_step(sys_, s_, dt); }
    EnergyReport report() const override { return energy_report(s_, sys_.params, sys_.f, sys_.options); }
    BoundReport bound() const override { return classical_bound_at(s_, sys_.params, energy0_, f_norm_); }
    void snapshot(const std::string& path) const override { write_snapshot(s_, sys_.params, path); }
    const VectorField& velocity() const override { return s_.u; }
    const ClassicalState& state() const { return s_; }

private:
    ClassicalSystem sys_;
    ClassicalState s_;
    double energy0_ = 0.0;
    double f_norm_ = 0.0;
};

struct TrackResult {
    std::string name;
    bool ok = true;
    std::string error;
    bool bounds_ok = true;
    std::vector<EnergyReport> reports;
    std::vector<BoundReport> bounds;
    long steps = 0;
};

struct RunResult {
    std::vector<TrackResult> tracks;
    std::vector<std::pair<double, double>> divergence;  ///< (t, ||u_0 - u_1||) when two tracks run
    double wall_seconds = 0.0;
    long steps = 0;

    bool ok() const {
        for (const auto& t : tracks)
            if (!t.ok || !t.bounds_ok) return false;
        return true;
    }
};

/// Output locations; an empty directory disables file output.
struct OutputSpec {
    std::string dir;
    std::vector<std::string> csv_names;       ///< one per track
    std::vector<std::string> snapshot_prefix; ///< one per track
};

/// Called at every diagnostics sample with the track index and track.
using SampleObserver = std::function<void(std::size_t, const Track&)>;

/// Advances all tracks with a common step to cfg.t_end. A track that blows
/// up stops; the others continue.
inline RunResult run_tracks(const RunConfig& cfg, std::vector<std::unique_ptr<Track>>& tracks,
                            const OutputSpec& out, const SampleObserver& observer = {}) {
    namespace fs = std::filesystem;
    const auto wall0 = std::chrono::steady_clock::now();
    const bool files = !out.dir.empty();
    if (files) fs::create_directories(out.dir);

    RunResult res;
    std::vector<EnergyLedger> ledgers(tracks.size());
    std::vector<std::unique_ptr<CsvWriter>> csv(tracks.size());
    std::unique_ptr<CsvWriter> div_csv;
    res.tracks.resize(tracks.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        res.tracks[i].name = i < out.csv_names.size() ? out.csv_names[i] : "track" + std::to_string(i);
        if (files) csv[i] = std::make_unique<CsvWriter>((fs::path(out.dir) / out.csv_names[i]).string(), diagnostics_columns());
    }
    if (files && tracks.size() == 2)
        div_csv = std::make_unique<CsvWriter>((fs::path(out.dir) / "divergence.csv").string(),
                                              std::vector<std::string>{"t", "u_diff_l2"});

    auto snapshot_all = [&](long step) {
        if (!files) return;
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            if (!res.tracks[i].ok) continue;
            char name[64];
            std::snprintf(name, sizeof name, "%s_%08ld.nmhd", out.snapshot_prefix[i].c_str(), step);
            tracks[i]->snapshot((fs::path(out.dir) / name).string());
        }
    };
    auto sample = [&]() {
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            TrackResult& tr = res.tracks[i];
            if (!tr.ok) continue;
            const EnergyReport& r = ledgers[i].push(tracks[i]->report());
            const BoundReport b = tracks[i]->bound();
            tr.bounds_ok = tr.bounds_ok && b.derived_ok;
            tr.reports.push_back(r);
            tr.bounds.push_back(b);
            if (csv[i]) csv[i]->row(diagnostics_row(r, b));
            if (observer) observer(i, *tracks[i]);
        }
        if (tracks.size() == 2 && res.tracks[0].ok && res.tracks[1].ok) {
            const double d = norm(tracks[0]->velocity() - tracks[1]->velocity());
            res.divergence.emplace_back(tracks[0]->time(), d);
            if (div_csv) div_csv->row({tracks[0]->time(), d});
        }
    };
    auto alive = [&]() {
        for (const auto& t : res.tracks)
            if (t.ok) return true;
        return false;
    };

    sample();
    const double t_end = cfg.t_end;
    const bool fixed = cfg.step.mode == StepMode::fixed;
    const long nfixed = fixed ? std::max(0L, long(std::ceil(t_end / cfg.step.dt - 1e-9))) : 0;
    long step = 0;
    double t = tracks.empty() ? t_end : tracks.front()->time();
    while (alive() && (fixed ? step < nfixed : t < t_end)) {
        double dt;
        if (fixed) {
            dt = step + 1 == nfixed ? t_end - t : cfg.step.dt;
        } else {
            dt = t_end - t;
            for (std::size_t i = 0; i < tracks.size(); ++i)
                if (res.tracks[i].ok) dt = std::min(dt, tracks[i]->stable_dt(cfg.step.cfl_safety));
        }
        if (!(dt > 0.0)) break;
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            if (!res.tracks[i].ok) continue;
            try {
                tracks[i]->step(dt);
                ++res.tracks[i].steps;
            } catch (const BlowUpError& e) {
                res.tracks[i].ok = false;
                res.tracks[i].error = e.what();
            }
        }
        ++step;
        t = t + dt;
        for (std::size_t i = 0; i < tracks.size(); ++i)
            if (res.tracks[i].ok) t = tracks[i]->time();
        const bool last = fixed ? step == nfixed : t >= t_end;
        if (step % cfg.output_every == 0 || last) sample();
        if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0 && !last) snapshot_all(step);
    }
    snapshot_all(step);
    res.steps = step;
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return res;
}

inline std::unique_ptr<Track> make_track(const RunConfig& cfg, const GridPtr& grid, bool classical) {
    if (!classical) {
        return std::make_unique<NewTrack>(build_initial_state(cfg, grid), cfg.params, build_forcing(cfg, grid),
                                          cfg.options());
    }
    return std::make_unique<ClassicalTrack>(build_classical_initial_state(cfg, grid), cfg.classical,
                                            build_forcing(cfg, grid).f, cfg.options());
}

/// `run`: one model, diagnostics.csv plus snapshots.
inline RunResult run(const RunConfig& cfg, const std::string& out_dir, const SampleObserver& observer = {}) {
    const GridPtr grid = cfg.make_grid();
    std::vector<std::unique_ptr<Track>> tracks;
    tracks.push_back(make_track(cfg, grid, cfg.model == "classical"));
    return run_tracks(cfg, tracks, {out_dir, {"diagnostics.csv"}, {"snapshot"}}, observer);
}

/// `compare`: new and classical models from shared u(0), H(0) = curl A(0).
inline RunResult compare(const RunConfig& cfg, const std::string& out_dir, const SampleObserver& observer = {}) {
    if (cfg.model != "new") throw ConfigError("model", "compare expects the new-model configuration");
    const GridPtr grid = cfg.make_grid();
    std::vector<std::unique_ptr<Track>> tracks;
    tracks.push_back(make_track(cfg, grid, false));
    tracks.push_back(make_track(cfg, grid, true));
    return run_tracks(cfg, tracks, {out_dir, {"new.csv", "classical.csv"}, {"new", "classical"}}, observer);
}

/// `convergence`: the Galerkin sequence over ks; convergence.csv in long
/// format (t, k, k_next, diff_l2) and bounds.csv per member.
inline SequenceResult convergence(const RunConfig& cfg, std::vector<std::size_t> ks, const std::string& out_dir) {
    if (cfg.model != "new") throw ConfigError("model", "convergence runs the new model");
    if (ks.empty()) ks = cfg.galerkin_ks;
    if (ks.empty()) throw ConfigError("galerkin_ks", "no Galerkin truncations given");
    const GridPtr grid = cfg.make_grid();
    const ModeOrdering order(*grid);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1 || ks[i] > order.size())
            throw ConfigError("galerkin_ks", "k=" + std::to_string(ks[i]) + " out of range [1, " +
                                                 std::to_string(order.size()) + "]");
        if (i && ks[i] <= ks[i - 1]) throw ConfigError("galerkin_ks", "must be strictly increasing");
    }
    SequenceConfig sc;
    sc.initial = build_initial_state(cfg, grid);
    sc.params = cfg.params;
    sc.forcing = build_forcing(cfg, grid);
    sc.options = cfg.options();
    sc.dt = cfg.step.mode == StepMode::fixed ? cfg.step.dt : stable_dt(sc.initial, cfg.params, *grid, cfg.step.cfl_safety);
    sc.t_end = cfg.t_end;
    sc.sample_every = cfg.output_every;
    SequenceResult r = run_sequence(sc, ks);

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        CsvWriter conv((fs::path(out_dir) / "convergence.csv").string(), {"t", "k", "k_next", "diff_l2"});
        for (const auto& row : r.rows) conv.row({row.t, double(row.k), double(row.k_next), row.diff});
        CsvWriter bounds((fs::path(out_dir) / "bounds.csv").string(),
                         {"k", "t", "bound_lhs", "bound_lhs_grad", "bound_rhs_paper", "bound_rhs_paper_grad",
                          "bound_rhs_derived"});
        for (const auto& m : r.members)
            for (const auto& b : m.bounds)
                bounds.row({double(m.k), b.t, b.lhs, b.lhs_grad, b.rhs_paper, b.rhs_paper_grad, b.rhs_derived});
    }
    return r;
}

}  // namespace nmhd
