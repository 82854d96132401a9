// nmhd command-line front end: run, compare, convergence, verify, snapshot-info.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nmhd/nmhd.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config = 2;

std::vector<std::size_t> parse_modes(const std::string& s) {
    std::vector<std::size_t> ks;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || v < 1) throw nmhd::ConfigError("--modes", "expected a comma-separated list of k >= 1");
        ks.push_back(std::size_t(v));
    }
    return ks;
}

void print_track(const nmhd::TrackResult& t) {
    std::printf("%s: %ld steps", t.name.c_str(), t.steps);
    if (!t.reports.empty()) {
        const auto& r = t.reports.back();
        std::printf(", t=%.6g E_kin=%.6g E_wave=%.6g E_grad=%.6g", r.t, r.E_kin, r.E_wave, r.E_grad);
    }
    std::printf("\n");
    if (!t.ok) std::printf("  %s\n", t.error.c_str());
    if (!t.bounds_ok) std::printf("  energy bound violated\n");
}

int cmd_run(const std::string& config, const std::string& out) {
    const nmhd::RunConfig cfg = nmhd::load_config(config);
    const nmhd::RunResult r = nmhd::run(cfg, out);
    for (const auto& t : r.tracks) print_track(t);
    std::printf("wall time %.3f s\n", r.wall_seconds);
    return r.ok() ? exit_ok : exit_check_failed;
}

int cmd_compare(const std::string& config, const std::string& out) {
    const nmhd::RunConfig cfg = nmhd::load_config(config);
    const nmhd::RunResult r = nmhd::compare(cfg, out);
    for (const auto& t : r.tracks) print_track(t);
    if (!r.divergence.empty())
        std::printf("||u_new - u_classical|| at t=%.6g: %.6g\n", r.divergence.back().first, r.divergence.back().second);
    return r.ok() ? exit_ok : exit_check_failed;
}

int cmd_convergence(const std::string& config, const std::string& out, const std::string& modes) {
    const nmhd::RunConfig cfg = nmhd::load_config(config);
    const nmhd::SequenceResult r = nmhd::convergence(cfg, parse_modes(modes), out);
    bool ok = true;
    for (const auto& m : r.members) {
        bool bounds = true;
        for (const auto& b : m.bounds) bounds = bounds && b.derived_ok;
        std::printf("k=%zu %s%s\n", m.k, m.ok ? "ok" : m.error.c_str(), bounds ? "" : " (energy bound violated)");
        ok = ok && m.ok && bounds;
    }
    const auto d = r.final_differences();
    bool decreasing = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::printf("  diff[%zu] = %.6g\n", i, d[i]);
        if (i && !(d[i] < d[i - 1])) decreasing = false;
    }
    std::printf("successive differences strictly decreasing: %s\n", decreasing ? "yes" : "no");
    return ok ? exit_ok : exit_check_failed;
}

int cmd_verify(const std::string& suite) {
    bool ok = true;
    for (const auto& c : nmhd::checks::run_suite(suite)) {
        std::printf("%s  %-44s value=%.3e limit=%.3e%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.limit, c.detail.empty() ? "" : "  ", c.detail.c_str());
        ok = ok && c.pass;
    }
    return ok ? exit_ok : exit_check_failed;
}

int cmd_snapshot_info(const std::string& path) {
    const nmhd::SnapshotHeader h = nmhd::read_snapshot_header(path);
    std::printf("version     %u\n", h.version);
    std::printf("model       %s\n", h.model == 0 ? "new" : "classical");
    std::printf("dim         %u\n", h.dim);
    std::printf("n           %u %u %u\n", h.n[0], h.n[1], h.n[2]);
    std::printf("box_length  %.17g %.17g %.17g\n", h.box_length[0], h.box_length[1], h.box_length[2]);
    std::printf("time        %.17g\n", h.time);
    if (h.model == 0) {
        std::printf("params      nu=%.17g rho0=%.17g rho_e=%.17g eps0=%.17g mu0=%.17g\n", h.params[0], h.params[1],
                    h.params[2], h.params[3], h.params[4]);
    } else {
        std::printf("params      nu=%.17g mu=%.17g rho0=%.17g mu0=%.17g\n", h.params[0], h.params[1], h.params[2],
                    h.params[3]);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral solver for incompressible MHD with a vector-potential wave equation"};
    app.require_subcommand(1);

    std::string config, out = "out", suite = "all", modes, path;

    auto* run = app.add_subcommand("run", "evolve one model and write diagnostics.csv and snapshots");
    run->add_option("--config", config, "JSON run configuration")->required();
    run->add_option("--out", out, "output directory")->capture_default_str();

    auto* cmp = app.add_subcommand("compare", "evolve the new and classical models from shared data");
    cmp->add_option("--config", config, "JSON run configuration")->required();
    cmp->add_option("--out", out, "output directory")->capture_default_str();

    auto* conv = app.add_subcommand("convergence", "run the Galerkin truncation sequence");
    conv->add_option("--config", config, "JSON run configuration")->required();
    conv->add_option("--out", out, "output directory")->capture_default_str();
    conv->add_option("--modes", modes, "comma-separated truncations, overrides galerkin_ks");

    auto* ver = app.add_subcommand("verify", "run oracle suites");
    ver->add_option("--suite", suite, "spectral|wave|tg|mms|all")
        ->check(CLI::IsMember({"spectral", "wave", "tg", "mms", "all"}))
        ->capture_default_str();

    auto* info = app.add_subcommand("snapshot-info", "print the header of an NMHD snapshot");
    info->add_option("path", path, "snapshot file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) return cmd_run(config, out);
        if (*cmp) return cmd_compare(config, out);
        if (*conv) return cmd_convergence(config, out, modes);
        if (*ver) return cmd_verify(suite);
        if (*info) return cmd_snapshot_info(path);
    } catch (const nmhd::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const nmhd::SnapshotError& e) {
        std::fprintf(stderr, "snapshot error: %s\n", e.what());
        return exit_check_failed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_check_failed;
    }
    return exit_ok;
}
