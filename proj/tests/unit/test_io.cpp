#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace nmhd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nmhd_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << s;
}

/// Runs the CLI and returns its exit code; stdout goes to `log`.
int cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(NMHD_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ConfigError config_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e;
    }
    throw std::runtime_error("expected a ConfigError");
}

SnapshotError snapshot_error(const fs::path& p) {
    try {
        read_snapshot(p.string());
    } catch (const SnapshotError& e) {
        return e;
    }
    throw std::runtime_error("expected a SnapshotError");
}

const char* minimal_config = R"({
  "model": "new", "dim": 2, "n": [32, 32],
  "initial_condition": {"type": "taylor_green"}, "t_end": 1
})";

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, MinimalParses) {
    const RunConfig c = parse_config_text(minimal_config);
    EXPECT_EQ(c.model, "new");
    EXPECT_EQ(c.dim, 2);
    EXPECT_EQ(c.n, (std::vector<int>{32, 32}));
    EXPECT_DOUBLE_EQ(c.box_length[0], 2 * std::numbers::pi);
    EXPECT_EQ(c.initial.u.type, "taylor_green");
    EXPECT_EQ(c.initial.A.type, "zero");
    EXPECT_DOUBLE_EQ(c.t_end, 1.0);
    EXPECT_TRUE(c.dealias);
    EXPECT_EQ(c.step.mode, StepMode::fixed);
    EXPECT_DOUBLE_EQ(c.step.cfl_safety, 0.4);
}

TEST(Config, UnknownKeyNamed) {
    const ConfigError e = config_error(R"({
      "model": "new", "dim": 2, "n": 8, "params": {"viscocity": 0.1},
      "initial_condition": {"type": "zero"}, "t_end": 1})");
    EXPECT_EQ(e.key(), "params.viscocity");
    EXPECT_NE(std::string(e.what()).find("viscocity"), std::string::npos);
    EXPECT_EQ(config_error(R"({"dim": 2, "n": 8, "t_end": 1, "initial_condition": {"type": "zero"}, "viscocity": 1})").key(),
              "viscocity");
}

TEST(Config, OddResolution) {
    const ConfigError e = config_error(R"({
      "model": "new", "dim": 2, "n": [31, 32],
      "initial_condition": {"type": "taylor_green"}, "t_end": 1})");
    EXPECT_EQ(e.key(), "n");
    EXPECT_NE(std::string(e.what()).find("odd resolution"), std::string::npos);
}

TEST(Config, RandomFieldNeedsSeed) {
    const ConfigError e = config_error(R"({
      "dim": 3, "n": 8, "t_end": 1,
      "initial_condition": {"u": {"type": "random_solenoidal", "energy": 1.0}}})");
    EXPECT_EQ(e.key(), "initial_condition.u.seed");
}

TEST(Config, AutoDtAndFullSchema) {
    const RunConfig c = parse_config_text(R"({
      "model": "new", "dim": 3, "n": [8, 8, 16], "box_length": [1, 2, 3],
      "params": {"nu": 0.01, "rho_e": -1.5, "eps0": 2, "mu0": 0.5, "rho0": 3},
      "classical_params": {"mu_resistivity": 0.2},
      "dt": "auto", "cfl_safety": 0.25, "t_end": 0.5, "output_every": 5, "snapshot_every": 10,
      "initial_condition": {
        "u": {"type": "random_solenoidal", "seed": 3, "energy": 2, "peak_mode": 2, "decay": 1},
        "A": {"type": "wave_mode", "kvec": [1, 0, 0], "evec": [0, 1, 0], "amp": 0.5},
        "W": {"type": "zero"}},
      "forcing": {"type": "single_mode", "kvec": [0, 1, 0], "evec": [1, 0, 0], "amp": 0.1},
      "dealias": false, "advection": false, "galerkin_ks": [2, 4]})");
    EXPECT_EQ(c.step.mode, StepMode::automatic);
    EXPECT_DOUBLE_EQ(c.step.cfl_safety, 0.25);
    EXPECT_DOUBLE_EQ(c.params.rho_e, -1.5);
    EXPECT_DOUBLE_EQ(c.classical.nu, 0.01);
    EXPECT_DOUBLE_EQ(c.classical.mu_resistivity, 0.2);
    EXPECT_DOUBLE_EQ(c.classical.rho0, 3.0);
    EXPECT_EQ(c.initial.u.seed, 3u);
    EXPECT_EQ(c.initial.A.kvec, (std::array<int, 3>{1, 0, 0}));
    EXPECT_EQ(c.forcing.type, "single_mode");
    EXPECT_FALSE(c.dealias);
    EXPECT_FALSE(c.advection);
    EXPECT_EQ(c.galerkin_ks, (std::vector<std::size_t>{2, 4}));
    EXPECT_EQ(c.output_every, 5);
    EXPECT_EQ(c.snapshot_every, 10);
}

TEST(Config, SchemaViolations) {
    const std::string base = R"("dim": 2, "n": 8, "initial_condition": {"type": "zero"})";
    EXPECT_EQ(config_error("{" + base + "}").key(), "t_end");
    EXPECT_EQ(config_error("{" + base + R"(, "t_end": 1, "dt": -1})").key(), "dt");
    EXPECT_EQ(config_error("{" + base + R"(, "t_end": 1, "dt": "fast"})").key(), "dt");
    EXPECT_EQ(config_error("{" + base + R"(, "t_end": 1, "cfl_safety": 2})").key(), "cfl_safety");
    EXPECT_EQ(config_error("{" + base + R"(, "t_end": 1, "model": "hall"})").key(), "model");
    EXPECT_EQ(config_error("{" + base + R"(, "t_end": 1, "galerkin_ks": [4, 2]})").key(), "galerkin_ks");
    EXPECT_EQ(config_error("{" + base + R"(, "t_end": 1, "params": {"eps0": 0}})").key(), "params");
    EXPECT_EQ(config_error(R"({"dim": 4, "n": 8, "t_end": 1, "initial_condition": {"type": "zero"}})").key(), "dim");
    EXPECT_EQ(config_error(R"({"dim": 2, "n": 8, "t_end": 1, "initial_condition": {"type": "vortex"}})").key(),
              "initial_condition.type");
    EXPECT_THROW(parse_config_text("{ not json"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, PolarizationCheckedWhenBuilt) {
    const RunConfig c = parse_config_text(R"({
      "dim": 3, "n": 8, "t_end": 1,
      "initial_condition": {"type": "wave_mode", "kvec": [1, 0, 0], "evec": [1, 0, 0]}})");
    EXPECT_THROW(build_initial_state(c, c.make_grid()), ConfigError);
}

TEST(InitialData, RandomSolenoidal) {
    auto g = make_grid(3, 16);
    const VectorField a = random_solenoidal(g, 5, 0.7, 3.0);
    const VectorField b = random_solenoidal(g, 5, 0.7, 3.0);
    EXPECT_EQ(test::max_diff(a, b), 0.0);
    EXPECT_GT(test::max_diff(a, random_solenoidal(g, 6, 0.7, 3.0)), 0.0);
    EXPECT_NEAR(0.5 * norm_sq(a), 0.7, 1e-12);
    EXPECT_TRUE(is_solenoidal(a));
    EXPECT_LE(hermitian_defect(a), 1e-15);
    for (std::size_t i = 0; i < g->nmodes(); ++i) {
        if (g->ksq(i) > 9.0) {
            EXPECT_EQ(std::abs(a.c[0][i]), 0.0);
        }
    }
}

// ---------------------------------------------------------------------------
// Snapshots

TEST(Snapshot, RoundTripNewModel) {
    const fs::path dir = scratch("snap_new");
    auto g = make_grid(3, {8, 8, 4}, {1.0, 2.0, 3.0});
    NewMHDState s = test::random_state(g, 3);
    s.t = 0.125;
    PhysParams p;
    p.nu = 0.01;
    p.rho_e = -2.0;
    const fs::path f = dir / "a.nmhd";
    write_snapshot(s, p, f.string());
    EXPECT_EQ(fs::file_size(f), snapshot_header_bytes + 8u * 3u * 3u * 256u);
    const Snapshot r = read_snapshot(f.string());
    ASSERT_TRUE(r.state.has_value());
    EXPECT_FALSE(r.classical_state.has_value());
    EXPECT_EQ(r.header.model, 0u);
    EXPECT_EQ(r.header.n, (std::array<std::uint32_t, 3>{8, 8, 4}));
    EXPECT_EQ(r.state->t, 0.125);
    EXPECT_EQ(r.params.rho_e, -2.0);
    EXPECT_EQ(r.params.nu, 0.01);
    // Stored samples are exact, so the reread coefficients equal one
    // inverse/forward pass of the originals bit for bit.
    EXPECT_EQ(test::max_diff(r.state->u, forward(g, inverse(s.u))), 0.0);
    EXPECT_EQ(test::max_diff(r.state->A, forward(g, inverse(s.A))), 0.0);
    EXPECT_EQ(test::max_diff(r.state->W, forward(g, inverse(s.W))), 0.0);
}

TEST(Snapshot, RoundTripClassicalTwoDimensional) {
    const fs::path dir = scratch("snap_cls");
    auto g = make_grid(2, 8);
    ClassicalState s{test::smooth_random(g, 1), test::smooth_random(g, 2), 2.5};
    ClassicalParams p;
    p.mu_resistivity = 0.3;
    const fs::path f = dir / "c.nmhd";
    write_snapshot(s, p, f.string());
    EXPECT_EQ(fs::file_size(f), snapshot_header_bytes + 8u * 2u * 2u * 64u);
    const Snapshot r = read_snapshot(f.string());
    ASSERT_TRUE(r.classical_state.has_value());
    EXPECT_EQ(r.header.model, 1u);
    EXPECT_EQ(r.header.dim, 2u);
    EXPECT_EQ(r.header.n[2], 1u);
    EXPECT_EQ(r.classical_params.mu_resistivity, 0.3);
    EXPECT_EQ(test::max_diff(r.classical_state->H, forward(g, inverse(s.H))), 0.0);
}

TEST(Snapshot, LittleEndianHeaderLayout) {
    const fs::path dir = scratch("snap_hdr");
    auto g = make_grid(3, 8);
    write_snapshot(NewMHDState::zero(g), PhysParams{}, (dir / "z.nmhd").string());
    const std::string b = slurp(dir / "z.nmhd");
    ASSERT_GE(b.size(), snapshot_header_bytes);
    EXPECT_EQ(b.substr(0, 4), "NMHD");
    auto u32 = [&](std::size_t off) {
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[off + i]);
        return v;
    };
    EXPECT_EQ(u32(4), 1u);   // version
    EXPECT_EQ(u32(8), 0u);   // model
    EXPECT_EQ(u32(12), 3u);  // dim
    EXPECT_EQ(u32(16), 8u);
    EXPECT_EQ(u32(24), 8u);
}

TEST(Snapshot, DistinctErrors) {
    const fs::path dir = scratch("snap_err");
    auto g = make_grid(3, 8);
    const fs::path good = dir / "good.nmhd";
    write_snapshot(test::random_state(g, 2), PhysParams{}, good.string());
    const std::string bytes = slurp(good);
    using K = SnapshotError::Kind;

    std::string bad = bytes;
    bad[0] = 'X';
    spit(dir / "magic.nmhd", bad);
    SnapshotError e = snapshot_error(dir / "magic.nmhd");
    EXPECT_EQ(e.kind(), K::bad_magic);
    EXPECT_NE(std::string(e.what()).find("bad magic"), std::string::npos);

    bad = bytes;
    bad[4] = 2;
    spit(dir / "version.nmhd", bad);
    e = snapshot_error(dir / "version.nmhd");
    EXPECT_EQ(e.kind(), K::version_mismatch);
    EXPECT_NE(std::string(e.what()).find("version mismatch"), std::string::npos);

    spit(dir / "short.nmhd", bytes.substr(0, bytes.size() - 8));
    e = snapshot_error(dir / "short.nmhd");
    EXPECT_EQ(e.kind(), K::truncated_payload);
    EXPECT_NE(std::string(e.what()).find("truncated payload"), std::string::npos);

    spit(dir / "header.nmhd", bytes.substr(0, 40));
    EXPECT_EQ(snapshot_error(dir / "header.nmhd").kind(), K::truncated_payload);

    spit(dir / "long.nmhd", bytes + "x");
    EXPECT_EQ(snapshot_error(dir / "long.nmhd").kind(), K::malformed);

    EXPECT_EQ(snapshot_error(dir / "missing.nmhd").kind(), K::io);
}

TEST(Snapshot, UsableAsInitialCondition) {
    const fs::path dir = scratch("snap_ic");
    auto g = make_grid(2, 16);
    NewMHDState s = test::random_state(g, 8);
    write_snapshot(s, PhysParams{}, (dir / "ic.nmhd").string());
    const RunConfig c = parse_config_text(R"({"dim": 2, "n": 16, "t_end": 0,
      "initial_condition": {"type": "file", "path": ")" + (dir / "ic.nmhd").string() + R"("}})");
    const NewMHDState r = build_initial_state(c, c.make_grid());
    EXPECT_LE(test::max_diff(r.u, s.u), 1e-15);
    const RunConfig wrong = parse_config_text(R"({"dim": 2, "n": 32, "t_end": 0,
      "initial_condition": {"type": "file", "path": ")" + (dir / "ic.nmhd").string() + R"("}})");
    EXPECT_THROW(build_initial_state(wrong, wrong.make_grid()), ConfigError);
}

// ---------------------------------------------------------------------------
// CSV

TEST(Csv, SeventeenDigitRoundTrip) {
    const fs::path dir = scratch("csv");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1e3, 1e3);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 50; ++i) rows.push_back({U(rng), U(rng) * 1e-300, 1.0 / (i + 3.0)});
    rows.push_back({0.1, -0.0, 5e-324});
    {
        CsvWriter w((dir / "x.csv").string(), {"a", "b", "c"});
        for (const auto& r : rows) w.row(r);
    }
    const CsvTable t = read_csv((dir / "x.csv").string());
    EXPECT_EQ(t.columns, (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(t.rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(t.rows[i][j], rows[i][j]);
}

TEST(Csv, RowWidthChecked) {
    const fs::path dir = scratch("csv_w");
    CsvWriter w((dir / "x.csv").string(), {"a", "b"});
    EXPECT_THROW(w.row({1.0}), ArgumentError);
}

// ---------------------------------------------------------------------------
// Command line

TEST(Cli, VerifySpectralSucceeds) {
    const fs::path dir = scratch("cli_verify");
    EXPECT_EQ(cli("verify --suite spectral", dir / "log"), 0);
    EXPECT_NE(slurp(dir / "log").find("PASS"), std::string::npos);
    EXPECT_EQ(slurp(dir / "log").find("FAIL"), std::string::npos);
}

TEST(Cli, RestStateRun) {
    const fs::path dir = scratch("cli_rest");
    spit(dir / "rest.json", R"({"dim": 3, "n": 8, "params": {"nu": 0.1, "rho_e": 1},
      "dt": 0.01, "t_end": 0.05, "initial_condition": {"type": "zero"}})");
    ASSERT_EQ(cli("run --config " + (dir / "rest.json").string() + " --out " + (dir / "out").string(), dir / "log"), 0);
    const CsvTable t = read_csv((dir / "out" / "diagnostics.csv").string());
    EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "E_kin", "E_wave", "E_grad", "dissipation", "work_f", "coupling",
                                                   "residual_u", "residual_A", "div_u_max", "div_A_max", "phi_grad_max",
                                                   "bound_lhs", "bound_rhs_paper", "bound_rhs_derived"}));
    ASSERT_EQ(t.rows.size(), 6u);
    for (const char* col : {"E_kin", "E_wave", "E_grad", "bound_lhs"})
        for (double v : t.column(col)) EXPECT_EQ(v, 0.0);
    EXPECT_DOUBLE_EQ(t.column("t").back(), 0.05);
    EXPECT_TRUE(fs::exists(dir / "out" / "snapshot_00000005.nmhd"));
}

TEST(Cli, ConvergenceDecreases) {
    const fs::path dir = scratch("cli_conv");
    spit(dir / "g.json", R"({"dim": 2, "n": 32, "params": {"nu": 0.01, "rho_e": 1}, "dt": 0.002, "t_end": 0.1,
      "output_every": 25, "initial_condition": {
        "u": {"type": "random_solenoidal", "seed": 11, "energy": 2, "peak_mode": 8, "decay": 2},
        "A": {"type": "random_solenoidal", "seed": 12, "energy": 1, "peak_mode": 8, "decay": 2},
        "W": {"type": "random_solenoidal", "seed": 13, "energy": 0.5, "peak_mode": 8, "decay": 2}}})");
    ASSERT_EQ(cli("convergence --config " + (dir / "g.json").string() + " --out " + (dir / "out").string() +
                      " --modes 4,8,16",
                  dir / "log"),
              0);
    const CsvTable t = read_csv((dir / "out" / "convergence.csv").string());
    EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "k", "k_next", "diff_l2"}));
    std::vector<double> last;
    for (const auto& r : t.rows)
        if (r[0] == t.rows.back()[0]) last.push_back(r[3]);
    ASSERT_EQ(last.size(), 2u);
    EXPECT_GT(last[0], last[1]);
    EXPECT_TRUE(fs::exists(dir / "out" / "bounds.csv"));
}

TEST(Cli, CompareWritesPairedOutput) {
    const fs::path dir = scratch("cli_cmp");
    spit(dir / "c.json", R"({"dim": 3, "n": 8, "params": {"nu": 0.05, "rho_e": 1}, "dt": 0.01, "t_end": 0.05,
      "initial_condition": {"u": {"type": "random_solenoidal", "seed": 1, "energy": 0.5, "peak_mode": 2},
                            "A": {"type": "wave_mode", "kvec": [1, 1, 0], "evec": [0, 0, 1], "amp": 0.5}}})");
    ASSERT_EQ(cli("compare --config " + (dir / "c.json").string() + " --out " + (dir / "out").string(), dir / "log"), 0);
    for (const char* f : {"new.csv", "classical.csv", "divergence.csv"}) EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    const CsvTable d = read_csv((dir / "out" / "divergence.csv").string());
    EXPECT_EQ(d.columns, (std::vector<std::string>{"t", "u_diff_l2"}));
    ASSERT_EQ(d.rows.size(), 6u);
    EXPECT_EQ(d.rows.front()[1], 0.0);
    EXPECT_GT(d.rows.back()[1], 0.0);
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("cli_exit");
    spit(dir / "bad.json", R"({"dim": 2, "n": 8, "t_end": 1, "viscocity": 0.1, "initial_condition": {"type": "zero"}})");
    EXPECT_EQ(cli("run --config " + (dir / "bad.json").string() + " --out " + (dir / "out").string(), dir / "log"), 2);
    EXPECT_NE(slurp(dir / "log").find("viscocity"), std::string::npos);
    EXPECT_EQ(cli("run --config " + (dir / "missing.json").string(), dir / "log"), 2);
    EXPECT_EQ(cli("frobnicate", dir / "log"), 2);
    EXPECT_EQ(cli("verify --suite nope", dir / "log"), 2);
    spit(dir / "junk.nmhd", "JUNKJUNKJUNK");
    EXPECT_EQ(cli("snapshot-info " + (dir / "junk.nmhd").string(), dir / "log"), 1);
    EXPECT_NE(slurp(dir / "log").find("bad magic"), std::string::npos);
}

TEST(Cli, SnapshotInfo) {
    const fs::path dir = scratch("cli_info");
    auto g = make_grid(2, {8, 16}, {1.0, 2.0});
    NewMHDState s = NewMHDState::zero(g);
    s.t = 0.75;
    PhysParams p;
    p.rho_e = 3.0;
    write_snapshot(s, p, (dir / "s.nmhd").string());
    ASSERT_EQ(cli("snapshot-info " + (dir / "s.nmhd").string(), dir / "log"), 0);
    const std::string out = slurp(dir / "log");
    EXPECT_NE(out.find("model       new"), std::string::npos);
    EXPECT_NE(out.find("n           8 16 1"), std::string::npos);
    EXPECT_NE(out.find("time        0.75"), std::string::npos);
    EXPECT_NE(out.find("rho_e=3"), std::string::npos);
}

TEST(Cli, IdenticalBytesAcrossRuns) {
    const fs::path dir = scratch("cli_det");
    spit(dir / "r.json", R"({"dim": 3, "n": 8, "params": {"nu": 0.02, "rho_e": 1}, "dt": 0.01, "t_end": 0.1,
      "snapshot_every": 5,
      "initial_condition": {"u": {"type": "random_solenoidal", "seed": 42, "energy": 0.5, "peak_mode": 2},
                            "W": {"type": "random_solenoidal", "seed": 43, "energy": 0.2, "peak_mode": 2}},
      "forcing": {"type": "single_mode", "kvec": [0, 1, 0], "evec": [1, 0, 0], "amp": 0.05}})");
    for (const char* o : {"a", "b"})
        ASSERT_EQ(cli("run --config " + (dir / "r.json").string() + " --out " + (dir / o).string(), dir / "log"), 0);
    EXPECT_EQ(slurp(dir / "a" / "diagnostics.csv"), slurp(dir / "b" / "diagnostics.csv"));
    EXPECT_EQ(slurp(dir / "a" / "snapshot_00000010.nmhd"), slurp(dir / "b" / "snapshot_00000010.nmhd"));
    EXPECT_FALSE(slurp(dir / "a" / "diagnostics.csv").empty());
}
