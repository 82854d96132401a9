// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nmhd/nmhd.hpp"

using namespace nmhd;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

RunConfig coupled_config(double dt) {
    RunConfig c = parse_config_text(R"({
      "model": "new", "dim": 3, "n": [32, 32, 32],
      "params": {"nu": 0.01, "rho0": 1.0, "rho_e": 1.0, "eps0": 1.0, "mu0": 1.0},
      "dt": 0.001, "t_end": 1.0, "output_every": 1,
      "initial_condition": {
        "u": {"type": "random_solenoidal", "seed": 7, "energy": 0.5, "peak_mode": 3},
        "A": {"type": "wave_mode", "kvec": [1, 1, 0], "evec": [0.0, 0.0, 1.0], "amp": 0.5}
      },
      "forcing": {"type": "single_mode", "kvec": [0, 1, 0], "evec": [1.0, 0.0, 0.0], "amp": 0.05}
    })");
    c.step.dt = dt;
    return c;
}

struct CoupledRun {
    RunResult res;
    double resid_u = 0.0, resid_A = 0.0;
    double gauge_worst = 0.0;  // max over samples of (defect / norm) for div u, div A, grad phi
    bool bound_ok = true;
    double bound_margin = 0.0; // max lhs / rhs_derived
    double paper_max_ratio = 0.0;
    std::pair<double, double> weak{0.0, 0.0};
    long samples = 0;
};

CoupledRun coupled_run(double dt) {
    const RunConfig cfg = coupled_config(dt);
    CoupledRun out;
    std::unique_ptr<WeakFormResidual> weak;
    auto observer = [&](std::size_t, const Track& tr) {
        const auto& s = dynamic_cast<const NewTrack&>(tr).state();
        if (!weak) {
            std::vector<VectorField> tests;
            for (std::uint64_t seed = 501; seed <= 505; ++seed) tests.push_back(random_solenoidal(s.u.grid, seed, 0.5, 4.0));
            weak = std::make_unique<WeakFormResidual>(std::move(tests), cfg.params, build_forcing(cfg, s.u.grid),
                                                      cfg.options());
        }
        weak->push(s);
    };
    out.res = run(cfg, "", observer);
    const TrackResult& t = out.res.tracks.at(0);
    for (const auto& r : t.reports) {
        out.resid_u = std::max(out.resid_u, std::abs(r.residual_u));
        out.resid_A = std::max(out.resid_A, std::abs(r.residual_A));
        out.gauge_worst = std::max({out.gauge_worst, r.div_u_max / r.u_norm, r.div_A_max / r.A_norm,
                                    r.phi_grad_max / (r.u_norm + r.A_norm)});
    }
    for (const auto& b : t.bounds) {
        out.bound_ok = out.bound_ok && b.lhs <= b.rhs_derived;
        out.bound_margin = std::max(out.bound_margin, b.lhs / b.rhs_derived);
        out.paper_max_ratio = std::max(out.paper_max_ratio, (b.lhs + b.lhs_grad) / b.rhs_paper);
    }
    out.samples = long(t.reports.size());
    if (weak) out.weak = weak->result();
    return out;
}

void criterion_1() {
    const double e = checks::oracle_equivalence(20, 8, 1);
    report(1, "transform vs direct DFT, 20 fields at 8^3", e <= 1e-12, fmt("rel err %.3e <= 1e-12", e));
}

void criterion_2() {
    const auto m = checks::projection_properties(20, 16, 3);
    const bool ok = m.idempotence <= 1e-14 && m.divergence <= 1e-13;
    report(2, "Leray projection idempotent and solenoidal", ok,
           fmt("idempotence %.3e <= 1e-14, div/||v|| %.3e <= 1e-13", m.idempotence, m.divergence));
}

void criterion_3() {
    const auto m = checks::wave_regression(16, 1e-3, 1.0);
    const bool ok = m.rel_error <= 1e-8 && m.energy_drift <= 1e-10;
    report(3, "standing wave 16^3", ok, fmt("rel L2 %.3e <= 1e-8, drift %.3e <= 1e-10", m.rel_error, m.energy_drift));
}

void criterion_4() {
    const double e = checks::taylor_green_regression(32, 0.1, 1e-3, 1.0);
    report(4, "Taylor-Green 32^2", e <= 1e-8, fmt("rel L2 %.3e <= 1e-8", e));
}

void criterion_8() {
    const RunConfig cfg = parse_config_text(R"({
      "model": "new", "dim": 2, "n": [64, 64],
      "params": {"nu": 0.01, "rho0": 1.0, "rho_e": 1.0, "eps0": 1.0, "mu0": 1.0},
      "dt": 0.001, "t_end": 0.5, "output_every": 50,
      "initial_condition": {
        "u": {"type": "random_solenoidal", "seed": 11, "energy": 2.0, "peak_mode": 12, "decay": 2.0},
        "A": {"type": "random_solenoidal", "seed": 12, "energy": 1.0, "peak_mode": 12, "decay": 2.0},
        "W": {"type": "random_solenoidal", "seed": 13, "energy": 0.5, "peak_mode": 12, "decay": 2.0}
      }
    })");
    const SequenceResult r = convergence(cfg, {4, 8, 16, 32}, "");
    const auto d = r.final_differences();
    bool ok = d.size() == 3;
    for (std::size_t i = 1; i < d.size(); ++i) ok = ok && d[i] < d[i - 1];
    std::string detail = "||u^{2k}-u^k|| at t=0.5:";
    for (double x : d) detail += fmt(" %.3e", x);
    report(8, "Galerkin sequence 2D 64^2, k=4,8,16,32 strictly decreasing", ok, detail);
}

void criterion_10() {
    const auto m = checks::mms_measure(checks::default_mms_config());
    bool ok = m.temporal.temporal_orders.size() == 2 && m.spatial.spatial_ratios.size() == 1;
    std::string detail = "temporal orders";
    for (double q : m.temporal.temporal_orders) {
        ok = ok && std::abs(q - 4.0) <= 0.2;
        detail += fmt(" %.3f", q);
    }
    detail += " (4.0 +/- 0.2), spatial drop";
    for (double r : m.spatial.spatial_ratios) {
        ok = ok && r >= 10.0;
        detail += fmt(" %.3e", r);
    }
    detail += " (>= 10)";
    report(10, "MMS orders", ok, detail);
}

void criterion_11() {
    RunConfig cfg = coupled_config(1e-3);
    cfg.forcing = {};
    cfg.classical.nu = 0.01;
    cfg.classical.mu_resistivity = 0.01;
    const auto dir = std::filesystem::temp_directory_path() / "nmhd_acceptance_compare";
    std::filesystem::remove_all(dir);
    const RunResult r = compare(cfg, dir.string());
    double resid = 0.0;
    bool ok = r.tracks.size() == 2 && r.tracks[1].ok;
    if (ok)
        for (const auto& e : r.tracks[1].reports)
            resid = std::max({resid, std::abs(e.residual_u), std::abs(e.residual_A), std::abs(e.residual_u + e.residual_A)});
    const bool emitted = std::filesystem::exists(dir / "divergence.csv") && r.divergence.size() == r.tracks[0].reports.size();
    ok = ok && resid <= 1e-6 && emitted;
    report(11, "classical comparison", ok,
           fmt("classical balance residual %.3e <= 1e-6, divergence samples %.0f", resid, double(r.divergence.size())));
    std::filesystem::remove_all(dir);
}

void criterion_12() {
    const RunConfig cfg = coupled_config(1e-3);
    const RunResult r = run(cfg, "");
    const bool ok = r.ok() && r.steps == 1000 && r.wall_seconds <= 60.0;
    report(12, "32^3 new model, 1000 RK4 steps, dealiased", ok,
           fmt("%.0f steps in %.1f s <= 60 s (per-step diagnostics included)", double(r.steps), r.wall_seconds));
}

}  // namespace

int main() {
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();

        const CoupledRun a = coupled_run(1e-3);
        const CoupledRun b = coupled_run(5e-4);
        const bool ran = a.res.ok() && b.res.ok() && a.res.steps == 1000 && b.res.steps == 2000;

        const double su = a.resid_u / b.resid_u, sA = a.resid_A / b.resid_A;
        report(5, "energy identities, 32^3 coupled run", ran && std::max(a.resid_u, a.resid_A) <= 1e-6 &&
                   std::max(b.resid_u, b.resid_A) <= 1e-6 && su >= 3.5 && sA >= 3.5,
               fmt("max |res_u| %.3e, |res_A| %.3e <= 1e-6; shrink under dt/2: u %.2f, A %.2f >= 3.5", a.resid_u,
                   a.resid_A, su, sA));

        const double gauge = std::max(a.gauge_worst, b.gauge_worst);
        report(6, "Coulomb gauge and compatibility", ran && gauge <= 1e-12,
               fmt("max defect / norm over %.0f samples %.3e <= 1e-12", double(a.samples + b.samples), gauge));

        report(7, "energy bound", ran && a.bound_ok && b.bound_ok,
               fmt("max lhs / rhs_derived %.3e <= 1; paper form (lhs+grad) / rhs_paper max %.3e",
                   std::max(a.bound_margin, b.bound_margin), std::max(a.paper_max_ratio, b.paper_max_ratio)));

        criterion_8();

        const double wu = a.weak.first / b.weak.first, wA = a.weak.second / b.weak.second;
        const bool weak_small = std::max({a.weak.first, a.weak.second, b.weak.first, b.weak.second}) <= 1e-4;
        const bool weak_rate = std::abs(wu - 4.0) <= 0.5 && std::abs(wA - 4.0) <= 0.5;
        report(9, "weak-form residual, 5 test fields", ran && weak_small && weak_rate,
               fmt("u %.3e, A %.3e <= 1e-4; shrink u %.2f, A %.2f (4 +/- 0.5)", a.weak.first, a.weak.second, wu, wA));

        criterion_10();
        criterion_11();
        criterion_12();
    } catch (const std::exception& e) {
        std::printf("FAIL    acceptance runner aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
