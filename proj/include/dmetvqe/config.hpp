// Copyright 2026 The dmetvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMETVQE_CONFIG_HPP
#define DMETVQE_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmet.hpp"
#include "errors.hpp"
#include "json.hpp"
#include "model.hpp"

namespace dmetvqe {

inline constexpr const char *kVersion = "0.1.0";

/// Configuration problem, with a location when one is known.
struct ConfigError : Error {
    using Error::Error;
};

/// One point of a sweep: everything needed to execute a single DMET run.
struct RunSpec {
    std::size_t index = 0;
    HubbardSpec model;
    double n_bar = 0.0;
    FragmentSpec fragment;
    DMETConfig dmet;
    std::uint64_t seed = 1;
    int repeat = 0;
};

struct ExperimentConfig {
    nlohmann::json source;
    std::string hash;
    std::vector<RunSpec> runs;
    bool ed_reference = true;
    std::string csv_name = "results.csv";
    std::string out_dir = "out";
};

/// FNV-1a over the canonical (sorted-key, compact) dump.
inline std::string config_hash(const nlohmann::json &j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline std::string where(const std::string &path) { return path.empty() ? "config" : path; }

template <typename T>
T get_or(const nlohmann::json &obj, const char *key, const T &fallback, const std::string &path) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError(where(path + "." + key) + ": wrong type");
    }
}

/// A list of numbers, a single number, or {"linspace": [a, b, n]}.
inline std::vector<double> number_list(const nlohmann::json &v, const std::string &path) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto &x : v) {
            if (!x.is_number()) throw ConfigError(path + ": expected numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    if (v.is_object() && v.contains("linspace")) {
        const auto &l = v.at("linspace");
        if (!l.is_array() || l.size() != 3) throw ConfigError(path + ".linspace: expected [start, stop, count]");
        double a = l[0].get<double>(), b = l[1].get<double>();
        int n = l[2].get<int>();
        if (n < 0) throw ConfigError(path + ".linspace: negative count");
        std::vector<double> out;
        for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
        return out;
    }
    throw ConfigError(path + ": expected a number, a list or a linspace");
}

inline FragmentSpec parse_fragment_entry(const nlohmann::json &v, int dimension, const std::string &path) {
    if (v.is_number_integer()) {
        int n = v.get<int>();
        if (n < 1) throw ConfigError(path + ": fragment size must be positive");
        return dimension == 1 ? FragmentSpec::line(n) : FragmentSpec::rect(1, n);
    }
    if (v.is_string()) {
        int nx = 0, ny = 0;
        char sep = 0;
        std::istringstream is(v.get<std::string>());
        if (!(is >> nx >> sep >> ny) || (sep != 'x' && sep != 'X') || nx < 1 || ny < 1)
            throw ConfigError(path + ": expected a size or \"NxxNy\"");
        if (dimension == 1 && ny != 1 && nx != 1) throw ConfigError(path + ": 1D fragments are lines");
        return dimension == 1 ? FragmentSpec::line(nx * ny) : FragmentSpec::rect(nx, ny);
    }
    if (v.is_object()) {
        int nx = get_or<int>(v, "Nx", 1, path), ny = get_or<int>(v, "Ny", 1, path);
        return dimension == 1 ? FragmentSpec::line(nx * ny) : FragmentSpec::rect(nx, ny);
    }
    throw ConfigError(path + ": unrecognised fragment");
}

inline void check_keys(const nlohmann::json &obj, std::initializer_list<const char *> allowed, const std::string &path) {
    if (!obj.is_object()) throw ConfigError(where(path) + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char *k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(where(path) + ": unknown key '" + it.key() + "'");
    }
}

/// 1-based line and column of a byte offset.
inline std::string line_col(const std::string &text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < offset; ++i) {
        if (text[i] == '\n') ++line, col = 1;
        else ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline ExperimentConfig expand(const nlohmann::json &j) {
    check_keys(j, {"model", "fragment", "solver", "sweep", "output", "comment"}, "");
    ExperimentConfig cfg;
    cfg.source = j;
    cfg.hash = config_hash(j);
    if (!j.contains("model")) throw ConfigError("config: missing 'model' block");
    const auto &m = j.at("model");
    check_keys(m, {"dimension", "Lx", "Ly", "t", "U", "boundary", "boundary_x", "boundary_y", "N_occ", "filling"}, "model");
    HubbardSpec base;
    base.dimension = get_or<int>(m, "dimension", 1, "model");
    base.Lx = get_or<int>(m, "Lx", base.dimension == 1 ? 240 : 20, "model");
    base.Ly = get_or<int>(m, "Ly", base.dimension == 1 ? 1 : 24, "model");
    base.t = get_or<double>(m, "t", 1.0, "model");
    try {
        Boundary b = parse_boundary(get_or<std::string>(m, "boundary", "anti-periodic", "model"));
        base.boundary_x = m.contains("boundary_x") ? parse_boundary(m.at("boundary_x").get<std::string>()) : b;
        base.boundary_y = m.contains("boundary_y") ? parse_boundary(m.at("boundary_y").get<std::string>()) : b;
    } catch (const SpecError &e) {
        throw ConfigError(std::string("model.boundary: ") + e.what());
    }
    const nlohmann::json s = j.value("solver", nlohmann::json::object());
    check_keys(s, {"kind", "variant", "depth", "optimizer", "shots", "final_shots", "seeds", "repeats", "tolerance", "max_iters",
                   "mu0", "mu1", "error_detection", "fidelity", "ed_reference", "warm_start", "spsa", "lbfgs"},
               "solver");
    DMETConfig dc;
    try {
        dc.solver = parse_solver(get_or<std::string>(s, "kind", "ed", "solver"));
        dc.vqe.variant = parse_variant(get_or<std::string>(s, "variant", "hv-min", "solver"));
        std::string default_opt = dc.solver == SolverKind::VQESampled ? "spsa" : "lbfgs";
        dc.vqe.optimizer = parse_optimizer(get_or<std::string>(s, "optimizer", default_opt, "solver"));
    } catch (const SpecError &e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    dc.vqe.shots = get_or<std::uint64_t>(s, "shots", 10000, "solver");
    dc.vqe.final_shots = get_or<std::uint64_t>(s, "final_shots", 100000, "solver");
    dc.vqe.error_detection = get_or<bool>(s, "error_detection", false, "solver");
    dc.vqe.compute_fidelity = get_or<bool>(s, "fidelity", false, "solver");
    dc.max_iters = get_or<int>(s, "max_iters", 30, "solver");
    dc.mu0 = get_or<double>(s, "mu0", 0.0, "solver");
    if (s.contains("mu1")) dc.mu1 = get_or<double>(s, "mu1", 0.0, "solver");
    if (s.contains("tolerance")) dc.tolerance = get_or<double>(s, "tolerance", 0.1, "solver");
    dc.warm_start = get_or<bool>(s, "warm_start", true, "solver");
    std::optional<int> spsa_iters;  // per fragment size unless given
    if (s.contains("spsa")) {
        const auto &sp = s.at("spsa");
        check_keys(sp, {"a", "A", "alpha", "c", "gamma", "max_iters", "keep_last"}, "solver.spsa");
        dc.vqe.spsa.a = get_or<double>(sp, "a", dc.vqe.spsa.a, "solver.spsa");
        dc.vqe.spsa.A = get_or<double>(sp, "A", dc.vqe.spsa.A, "solver.spsa");
        dc.vqe.spsa.alpha = get_or<double>(sp, "alpha", dc.vqe.spsa.alpha, "solver.spsa");
        dc.vqe.spsa.c = get_or<double>(sp, "c", dc.vqe.spsa.c, "solver.spsa");
        dc.vqe.spsa.gamma = get_or<double>(sp, "gamma", dc.vqe.spsa.gamma, "solver.spsa");
        if (sp.contains("max_iters")) spsa_iters = get_or<int>(sp, "max_iters", 0, "solver.spsa");
        dc.vqe.spsa.keep_last = get_or<int>(sp, "keep_last", dc.vqe.spsa.keep_last, "solver.spsa");
    }
    if (s.contains("lbfgs")) {
        const auto &lb = s.at("lbfgs");
        check_keys(lb, {"gradient_tol", "fd_step", "history", "max_iters"}, "solver.lbfgs");
        dc.vqe.lbfgs.gradient_tol = get_or<double>(lb, "gradient_tol", dc.vqe.lbfgs.gradient_tol, "solver.lbfgs");
        dc.vqe.lbfgs.fd_step = get_or<double>(lb, "fd_step", dc.vqe.lbfgs.fd_step, "solver.lbfgs");
        dc.vqe.lbfgs.history = get_or<int>(lb, "history", dc.vqe.lbfgs.history, "solver.lbfgs");
        dc.vqe.lbfgs.max_iters = get_or<int>(lb, "max_iters", dc.vqe.lbfgs.max_iters, "solver.lbfgs");
    }
    cfg.ed_reference = get_or<bool>(s, "ed_reference", true, "solver");

    if (j.contains("output")) {
        const auto &o = j.at("output");
        check_keys(o, {"dir", "csv"}, "output");
        cfg.out_dir = get_or<std::string>(o, "dir", cfg.out_dir, "output");
        cfg.csv_name = get_or<std::string>(o, "csv", cfg.csv_name, "output");
    }

    auto expand_block = [&](const nlohmann::json &sweep, const std::string &where) {
        check_keys(sweep, {"U", "filling", "N_frag", "fragment", "depth", "seed", "comment"}, where);
        std::vector<double> Us = sweep.contains("U") ? number_list(sweep.at("U"), where + ".U")
                                                     : std::vector<double>{get_or<double>(m, "U", 4.0, "model")};
        std::vector<std::optional<double>> fillings;
        if (sweep.contains("filling")) {
            for (double f : number_list(sweep.at("filling"), where + ".filling")) fillings.push_back(f);
        } else if (m.contains("filling")) {
            fillings.push_back(get_or<double>(m, "filling", 1.0, "model"));
        } else if (m.contains("N_occ")) {
            fillings.push_back(std::nullopt);
        } else {
            throw ConfigError("model: give 'N_occ' or 'filling'");
        }

        std::vector<FragmentSpec> frags;
        const char *fkey = sweep.contains("N_frag") ? "N_frag" : (sweep.contains("fragment") ? "fragment" : nullptr);
        if (fkey) {
            const auto &list = sweep.at(fkey);
            if (!list.is_array()) throw ConfigError(where + "." + fkey + ": expected a list");
            for (std::size_t k = 0; k < list.size(); ++k)
                frags.push_back(parse_fragment_entry(list[k], base.dimension, where + "." + fkey + "[" + std::to_string(k) + "]"));
        } else {
            frags.push_back(parse_fragment_entry(j.value("fragment", nlohmann::json(1)), base.dimension, "fragment"));
        }

        std::vector<double> depth_list{static_cast<double>(get_or<int>(s, "depth", 1, "solver"))};
        if (sweep.contains("depth")) depth_list = number_list(sweep.at("depth"), where + ".depth");
        std::vector<double> seed_list{1.0};
        if (sweep.contains("seed")) seed_list = number_list(sweep.at("seed"), where + ".seed");
        else if (s.contains("seeds")) seed_list = number_list(s.at("seeds"), "solver.seeds");
        const int repeats = get_or<int>(s, "repeats", 1, "solver");
        if (repeats < 1) throw ConfigError("solver.repeats: must be positive");
        if (dc.solver == SolverKind::ED) depth_list = {0.0};
        for (double U : Us)
            for (const auto &fill : fillings)
                for (const FragmentSpec &f : frags)
                    for (double depth : depth_list)
                        for (double seed : seed_list)
                            for (int rep = 0; rep < repeats; ++rep) {
                                RunSpec r;
                                r.index = cfg.runs.size();
                                r.model = base;
                                r.model.U = U;
                                if (fill) {
                                    r.n_bar = *fill;
                                    r.model.N_occ = occupation_from_filling(*fill, base.num_sites());
                                } else {
                                    r.model.N_occ = get_or<int>(m, "N_occ", 0, "model");
                                    r.n_bar = static_cast<double>(r.model.N_occ) / base.num_sites();
                                }
                                r.fragment = f;
                                r.dmet = dc;
                                r.dmet.vqe.depth = static_cast<int>(depth);
                                r.dmet.vqe.spsa.max_iters = spsa_iters.value_or(default_spsa_iterations(f.size()));
                                r.seed = static_cast<std::uint64_t>(seed) + static_cast<std::uint64_t>(rep) * 1000003ULL;
                                r.dmet.vqe.seed = r.seed;
                                r.dmet.vqe.spsa.seed = r.seed;
                                r.repeat = rep;
                                try {
                                    validate(r.model, r.fragment);
                                } catch (const SpecError &e) {
                                    throw ConfigError("run " + std::to_string(r.index) + ": " + e.what());
                                }
                                cfg.runs.push_back(std::move(r));
                            }
    };
    const nlohmann::json sweep = j.value("sweep", nlohmann::json::object());
    if (sweep.is_array()) {
        for (std::size_t k = 0; k < sweep.size(); ++k) expand_block(sweep[k], "sweep[" + std::to_string(k) + "]");
    } else {
        expand_block(sweep, "sweep");
    }
    return cfg;
}

}  // namespace detail

/// Expands a parsed configuration into its list of runs. A sweep is one block
/// or a list of blocks; within a block the order is U, filling, fragment,
/// depth, seed, repeat.
inline ExperimentConfig expand_config(const nlohmann::json &j) {
    try {
        return detail::expand(j);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig parse_config_text(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("parse error at " + detail::line_col(text, e.byte) + ": " + e.what());
    }
    return expand_config(j);
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace dmetvqe

#endif  // DMETVQE_CONFIG_HPP
