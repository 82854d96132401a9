/// @file config.hpp
/// @brief JSON run configuration with strict schema validation.
#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmhd/timestep.hpp"

namespace nmhd {

/// One initial field. `type` is zero | taylor_green | wave_mode | random_solenoidal.
struct FieldSpec {
    std::string type = "zero";
    std::array<int, 3> kvec{0, 0, 0};
    std::array<double, 3> evec{0.0, 0.0, 0.0};
    double amp = 1.0;
    std::uint64_t seed = 0;
    double energy = 0.5;
    double peak_mode = 4.0;
    double decay = 0.0;  ///< amplitude factor exp(-decay |m|) for random fields
};

struct InitialSpec {
    std::string file;  ///< snapshot path; overrides the per-field specs
    FieldSpec u, A, W;
    std::optional<FieldSpec> H;  ///< classical only; default H = curl A
};

struct ForcingSpec {
    std::string type = "none";  ///< none | single_mode | file
    std::array<int, 3> kvec{0, 0, 0};
    std::array<double, 3> evec{0.0, 0.0, 0.0};
    double amp = 0.0;
    std::string path;
};

struct RunConfig {
    std::string model = "new";
    int dim = 3;
    std::vector<int> n;
    std::vector<double> box_length;
    PhysParams params;
    ClassicalParams classical;
    StepControl step;
    double t_end = 0.0;
    int output_every = 1;
    int snapshot_every = 0;  ///< 0: final snapshot only
    InitialSpec initial;
    ForcingSpec forcing;
    bool dealias = true;
    bool advection = true;
    std::vector<std::size_t> galerkin_ks;

    ModelOptions options() const { return {dealias, advection}; }
    GridPtr make_grid() const { return nmhd::make_grid(dim, n, box_length); }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        const std::string path = where.empty() ? k : where + "." + k;
        if (!ok.count(k)) throw ConfigError(path, "unknown key '" + k + "'");
    }
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& path) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path, "invalid value");
    }
}

inline double get_number(const json& j, const char* key, const std::string& where, double fallback) {
    if (!j.contains(key)) return fallback;
    const std::string path = where.empty() ? key : where + "." + key;
    if (!j.at(key).is_number()) throw ConfigError(path, "expected a number");
    return j.at(key).get<double>();
}

inline double require_number(const json& j, const char* key, const std::string& where) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!j.contains(key)) throw ConfigError(path, "missing required key '" + std::string(key) + "'");
    return get_number(j, key, where, 0.0);
}

inline bool get_bool(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ConfigError(key, "expected a boolean");
    return j.at(key).get<bool>();
}

template <class T, std::size_t N>
std::array<T, N> get_vec(const json& j, const char* key, const std::string& where, int dim) {
    const std::string path = where + "." + key;
    if (!j.contains(key)) throw ConfigError(path, "missing required key '" + std::string(key) + "'");
    const json& a = j.at(key);
    if (!a.is_array() || a.size() != std::size_t(dim)) throw ConfigError(path, "expected an array of length dim");
    std::array<T, N> out{};
    for (int d = 0; d < dim; ++d) {
        if (!a[d].is_number()) throw ConfigError(path, "expected numbers");
        if constexpr (std::is_integral_v<T>) {
            if (!a[d].is_number_integer()) throw ConfigError(path, "expected integers");
        }
        out[d] = a[d].get<T>();
    }
    return out;
}

inline FieldSpec parse_field(const json& j, const std::string& where, int dim) {
    if (!j.is_object() || !j.contains("type")) throw ConfigError(where + ".type", "missing required key 'type'");
    FieldSpec f;
    f.type = get_as<std::string>(j, "type", where + ".type");
    if (f.type == "zero" || f.type == "taylor_green") {
        check_keys(j, where, {"type"});
    } else if (f.type == "wave_mode") {
        check_keys(j, where, {"type", "kvec", "evec", "amp"});
        f.kvec = get_vec<int, 3>(j, "kvec", where, dim);
        f.evec = get_vec<double, 3>(j, "evec", where, dim);
        f.amp = get_number(j, "amp", where, 1.0);
    } else if (f.type == "random_solenoidal") {
        check_keys(j, where, {"type", "seed", "energy", "peak_mode", "decay"});
        if (!j.contains("seed")) throw ConfigError(where + ".seed", "random_solenoidal requires a seed");
        if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
            throw ConfigError(where + ".seed", "seed must be a non-negative integer");
        f.seed = j.at("seed").get<std::uint64_t>();
        f.energy = get_number(j, "energy", where, 0.5);
        f.peak_mode = get_number(j, "peak_mode", where, 4.0);
        f.decay = get_number(j, "decay", where, 0.0);
        if (!(f.energy >= 0.0)) throw ConfigError(where + ".energy", "energy must be >= 0");
        if (!(f.peak_mode >= 1.0)) throw ConfigError(where + ".peak_mode", "peak_mode must be >= 1");
        if (!(f.decay >= 0.0)) throw ConfigError(where + ".decay", "decay must be >= 0");
    } else {
        throw ConfigError(where + ".type", "unknown initial condition type '" + f.type + "'");
    }
    return f;
}

inline InitialSpec parse_initial(const json& j, int dim) {
    const std::string where = "initial_condition";
    if (!j.is_object()) throw ConfigError(where, "expected an object");
    InitialSpec ic;
    if (j.contains("type")) {
        // Single-field shorthand.
        const std::string type = get_as<std::string>(j, "type", where + ".type");
        if (type == "file") {
            check_keys(j, where, {"type", "path"});
            ic.file = get_as<std::string>(j, "path", where + ".path");
            if (ic.file.empty()) throw ConfigError(where + ".path", "empty path");
        } else if (type == "wave_mode") {
            ic.A = parse_field(j, where, dim);
        } else {
            ic.u = parse_field(j, where, dim);
        }
        return ic;
    }
    check_keys(j, where, {"u", "A", "W", "H"});
    if (j.contains("u")) ic.u = parse_field(j.at("u"), where + ".u", dim);
    if (j.contains("A")) ic.A = parse_field(j.at("A"), where + ".A", dim);
    if (j.contains("W")) ic.W = parse_field(j.at("W"), where + ".W", dim);
    if (j.contains("H")) ic.H = parse_field(j.at("H"), where + ".H", dim);
    return ic;
}

inline ForcingSpec parse_forcing(const json& j, int dim) {
    const std::string where = "forcing";
    ForcingSpec f;
    if (j.is_string()) {
        f.type = j.get<std::string>();
        if (f.type != "none") throw ConfigError(where, "forcing '" + f.type + "' needs an object");
        return f;
    }
    if (!j.is_object() || !j.contains("type")) throw ConfigError(where + ".type", "missing required key 'type'");
    f.type = get_as<std::string>(j, "type", where + ".type");
    if (f.type == "none") {
        check_keys(j, where, {"type"});
    } else if (f.type == "single_mode") {
        check_keys(j, where, {"type", "kvec", "evec", "amp"});
        f.kvec = get_vec<int, 3>(j, "kvec", where, dim);
        f.evec = get_vec<double, 3>(j, "evec", where, dim);
        f.amp = get_number(j, "amp", where, 1.0);
    } else if (f.type == "file") {
        check_keys(j, where, {"type", "path"});
        f.path = get_as<std::string>(j, "path", where + ".path");
    } else {
        throw ConfigError(where + ".type", "unknown forcing type '" + f.type + "'");
    }
    return f;
}

inline void parse_new_params(const json& j, PhysParams& p) {
    check_keys(j, "params", {"nu", "rho0", "rho_e", "eps0", "mu0"});
    p.nu = get_number(j, "nu", "params", p.nu);
    p.rho0 = get_number(j, "rho0", "params", p.rho0);
    p.rho_e = get_number(j, "rho_e", "params", p.rho_e);
    p.eps0 = get_number(j, "eps0", "params", p.eps0);
    p.mu0 = get_number(j, "mu0", "params", p.mu0);
    try {
        p.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("params", e.what());
    }
}

inline void parse_classical_params(const json& j, const std::string& where, ClassicalParams& p) {
    check_keys(j, where, {"nu", "mu_resistivity", "rho0", "mu0"});
    p.nu = get_number(j, "nu", where, p.nu);
    p.mu_resistivity = get_number(j, "mu_resistivity", where, p.mu_resistivity);
    p.rho0 = get_number(j, "rho0", where, p.rho0);
    p.mu0 = get_number(j, "mu0", where, p.mu0);
    try {
        p.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(where, e.what());
    }
}

}  // namespace detail

/// Validates a parsed JSON document. Every unknown key is rejected.
inline RunConfig parse_config(const nlohmann::json& j) {
    using detail::json;
    detail::check_keys(j, "",
                       {"model", "dim", "n", "box_length", "params", "classical_params", "dt", "cfl_safety", "t_end",
                        "output_every", "snapshot_every", "initial_condition", "forcing", "dealias", "advection",
                        "galerkin_ks"});
    RunConfig c;
    if (j.contains("model")) c.model = detail::get_as<std::string>(j, "model", "model");
    if (c.model != "new" && c.model != "classical") throw ConfigError("model", "model must be \"new\" or \"classical\"");

    if (!j.contains("dim") || !j.at("dim").is_number_integer()) throw ConfigError("dim", "missing or non-integer dim");
    c.dim = j.at("dim").get<int>();
    if (c.dim != 2 && c.dim != 3) throw ConfigError("dim", "dim must be 2 or 3");

    if (!j.contains("n")) throw ConfigError("n", "missing required key 'n'");
    const json& jn = j.at("n");
    if (jn.is_number_integer()) {
        c.n.assign(c.dim, jn.get<int>());
    } else if (jn.is_array() && jn.size() == std::size_t(c.dim)) {
        for (const auto& v : jn) {
            if (!v.is_number_integer()) throw ConfigError("n", "resolutions must be integers");
            c.n.push_back(v.get<int>());
        }
    } else {
        throw ConfigError("n", "expected an integer or an array of length dim");
    }

    c.box_length.assign(c.dim, 2.0 * std::numbers::pi);
    if (j.contains("box_length")) {
        const json& jl = j.at("box_length");
        if (jl.is_number()) {
            c.box_length.assign(c.dim, jl.get<double>());
        } else if (jl.is_array() && jl.size() == std::size_t(c.dim)) {
            for (int d = 0; d < c.dim; ++d) {
                if (!jl[d].is_number()) throw ConfigError("box_length", "expected numbers");
                c.box_length[d] = jl[d].get<double>();
            }
        } else {
            throw ConfigError("box_length", "expected a number or an array of length dim");
        }
    }
    try {
        (void)c.make_grid();
    } catch (const ArgumentError& e) {
        const std::string what = e.what();
        throw ConfigError(what.find("box length") != std::string::npos ? "box_length" : "n", what);
    }

    if (j.contains("params")) {
        if (c.model == "new") {
            detail::parse_new_params(j.at("params"), c.params);
        } else {
            detail::parse_classical_params(j.at("params"), "params", c.classical);
        }
    }
    if (c.model == "new") {
        // Classical comparison defaults to the same fluid with resistivity = viscosity.
        c.classical.nu = c.params.nu;
        c.classical.mu_resistivity = c.params.nu;
        c.classical.rho0 = c.params.rho0;
        c.classical.mu0 = c.params.mu0;
    }
    if (j.contains("classical_params")) detail::parse_classical_params(j.at("classical_params"), "classical_params", c.classical);

    if (j.contains("dt")) {
        const json& jd = j.at("dt");
        if (jd.is_string() && jd.get<std::string>() == "auto") {
            c.step.mode = StepMode::automatic;
        } else if (jd.is_number() && jd.get<double>() > 0.0) {
            c.step.dt = jd.get<double>();
        } else {
            throw ConfigError("dt", "dt must be a positive number or \"auto\"");
        }
    }
    c.step.cfl_safety = detail::get_number(j, "cfl_safety", "", c.step.cfl_safety);
    if (!(c.step.cfl_safety > 0.0 && c.step.cfl_safety <= 1.0)) throw ConfigError("cfl_safety", "cfl_safety must lie in (0, 1]");

    c.t_end = detail::require_number(j, "t_end", "");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("t_end", "t_end must be >= 0");

    for (const char* key : {"output_every", "snapshot_every"}) {
        if (!j.contains(key)) continue;
        if (!j.at(key).is_number_integer()) throw ConfigError(key, "expected an integer");
        const int v = j.at(key).get<int>();
        if (v < 0 || (v == 0 && std::string(key) == "output_every")) throw ConfigError(key, "out of range");
        (std::string(key) == "output_every" ? c.output_every : c.snapshot_every) = v;
    }

    if (!j.contains("initial_condition")) throw ConfigError("initial_condition", "missing required key 'initial_condition'");
    c.initial = detail::parse_initial(j.at("initial_condition"), c.dim);
    if (j.contains("forcing")) c.forcing = detail::parse_forcing(j.at("forcing"), c.dim);

    c.dealias = detail::get_bool(j, "dealias", true);
    c.advection = detail::get_bool(j, "advection", true);

    if (j.contains("galerkin_ks")) {
        const json& jk = j.at("galerkin_ks");
        if (!jk.is_array() || jk.empty()) throw ConfigError("galerkin_ks", "expected a non-empty array");
        for (const auto& v : jk) {
            if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError("galerkin_ks", "entries must be integers >= 1");
            c.galerkin_ks.push_back(v.get<std::size_t>());
        }
        for (std::size_t i = 1; i < c.galerkin_ks.size(); ++i)
            if (c.galerkin_ks[i] <= c.galerkin_ks[i - 1]) throw ConfigError("galerkin_ks", "must be strictly increasing");
    }
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace nmhd
