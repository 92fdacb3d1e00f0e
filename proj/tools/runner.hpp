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

#ifndef DMETVQE_TOOLS_RUNNER_HPP
#define DMETVQE_TOOLS_RUNNER_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dmetvqe/config.hpp"
#include "dmetvqe/dmet.hpp"
#include "json.hpp"

namespace dmetvqe::runner {

namespace fs = std::filesystem;

inline const std::vector<std::string> &csv_columns() {
    static const std::vector<std::string> cols = {
        "dimension", "Lx",       "Ly",          "boundary",        "t",                   "U",
        "n_bar",     "N_occ",    "N_frag",      "Nx",              "Ny",                  "solver",
        "variant",   "depth",    "shots",       "seed",            "mu_star",             "energy_per_site",
        "double_occ_per_site",   "ed_reference_energy",            "rel_error",           "evaluations",
        "wall_time_s"};
    return cols;
}

struct RunOptions {
    int workers = 1;
    bool timings = false;
};

struct RunOutcome {
    RunSpec spec;
    std::optional<DMETResult> result;
    std::optional<double> reference;
    std::string error;
    std::string reference_error;
    double wall_time_s = 0.0;
};

/// Writes through a temporary file renamed into place.
inline void write_atomic(const fs::path &path, const std::string &text) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string boundary_label(const HubbardSpec &m) {
    if (m.dimension == 1 || m.boundary_x == m.boundary_y) return to_string(m.boundary_x);
    return std::string(to_string(m.boundary_x)) + "/" + to_string(m.boundary_y);
}

inline bool is_vqe(const RunSpec &r) { return r.dmet.solver != SolverKind::ED; }

inline std::vector<std::string> csv_row(const RunOutcome &o, bool timings) {
    const RunSpec &r = o.spec;
    const HubbardSpec &m = r.model;
    const double nan = std::nan("");
    const double energy = o.result ? o.result->energy_per_site : nan;
    const double ref = o.reference ? *o.reference : nan;
    const double rel = (o.result && o.reference) ? std::abs(energy - ref) / std::abs(ref) : nan;
    return {std::to_string(m.dimension),
            std::to_string(m.Lx),
            std::to_string(m.Ly),
            boundary_label(m),
            fmt(m.t),
            fmt(m.U),
            fmt(r.n_bar),
            std::to_string(m.N_occ),
            std::to_string(r.fragment.size()),
            std::to_string(r.fragment.Nx),
            std::to_string(r.fragment.Ny),
            to_string(r.dmet.solver),
            is_vqe(r) ? to_string(r.dmet.vqe.variant) : "-",
            std::to_string(is_vqe(r) ? r.dmet.vqe.depth : 0),
            std::to_string(r.dmet.solver == SolverKind::VQESampled ? r.dmet.vqe.shots : 0),
            std::to_string(r.seed),
            fmt(o.result ? o.result->mu_star : nan),
            fmt(energy),
            fmt(o.result ? o.result->double_occ_per_site : nan),
            fmt(ref),
            fmt(rel),
            std::to_string(o.result ? o.result->evaluations : 0),
            fmt(timings ? o.wall_time_s : 0.0)};
}

inline std::string csv_text(const ExperimentConfig &cfg, const std::vector<RunOutcome> &rows, bool timings) {
    std::ostringstream os;
    os << "# dmetvqe " << kVersion << " config " << cfg.hash << "\n";
    const auto &cols = csv_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
    os << "\n";
    for (const RunOutcome &o : rows) {
        auto cells = csv_row(o, timings);
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
        os << "\n";
    }
    return os.str();
}

inline nlohmann::json run_json(const ExperimentConfig &cfg, const RunOutcome &o, bool timings) {
    const RunSpec &r = o.spec;
    nlohmann::json j;
    j["version"] = kVersion;
    j["config_hash"] = cfg.hash;
    j["index"] = r.index;
    nlohmann::json params;
    const auto cells = csv_row(o, timings);
    const auto &cols = csv_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) params[cols[k]] = cells[k];
    j["row"] = params;
    j["secant"] = {{"mu0", r.dmet.mu0},
                   {"mu1", r.dmet.mu1 ? *r.dmet.mu1 : r.model.U / 2.0},
                   {"tolerance", r.dmet.tol()},
                   {"max_iters", r.dmet.max_iters},
                   {"warm_start", r.dmet.solver == SolverKind::VQESampled && r.dmet.warm_start}};
    if (is_vqe(r))
        j["vqe"] = {{"optimizer", to_string(r.dmet.vqe.optimizer)},
                    {"error_detection", r.dmet.vqe.error_detection},
                    {"final_shots", r.dmet.vqe.final_shots},
                    {"theta_jitter", r.dmet.vqe.start_jitter}};
    if (o.result) {
        const DMETResult &d = *o.result;
        nlohmann::json trace = nlohmann::json::array();
        for (const SolverPoint &p : d.trace) {
            nlohmann::json t = {{"mu", p.mu}, {"f", p.f}, {"embedded_energy", p.energy}, {"evaluations", p.evaluations}};
            if (p.fidelity) t["fidelity"] = *p.fidelity;
            trace.push_back(t);
        }
        j["result"] = {{"mu_star", d.mu_star},
                       {"energy_per_site", d.energy_per_site},
                       {"double_occ_per_site", d.double_occ_per_site},
                       {"secant_iterations", d.secant_iterations},
                       {"evaluations", d.evaluations},
                       {"ansatz_depth", d.ansatz_depth},
                       {"measurement_rounds", d.measurement_rounds},
                       {"warnings", d.warnings},
                       {"mu_trace", trace}};
        if (d.fidelity) j["result"]["fidelity"] = *d.fidelity;
    }
    if (o.reference) j["ed_reference_energy"] = *o.reference;
    if (!o.error.empty()) j["error"] = o.error;
    if (!o.reference_error.empty()) j["reference_error"] = o.reference_error;
    return j;
}

namespace detail {

using RefKey = std::tuple<int, int, int, double, double, int, int, int, int, int>;

inline RefKey reference_key(const RunSpec &r) {
    const HubbardSpec &m = r.model;
    return {m.dimension, m.Lx, m.Ly, m.t, m.U, static_cast<int>(m.boundary_x), static_cast<int>(m.boundary_y), m.N_occ,
            r.fragment.Nx, r.fragment.Ny};
}

/// Runs jobs [0, n) on `workers` threads.
template <typename F>
void parallel_for(std::size_t n, int workers, F &&job) {
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t k = next++; k < n; k = next++) job(k);
    };
    const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(loop);
    loop();
    for (auto &t : pool) t.join();
}

inline std::string describe(const std::exception &e) {
    if (auto *nc = dynamic_cast<const NonConvergence *>(&e))
        return std::string("NonConvergence: ") + nc->what() + " (best mu " + fmt(nc->best_mu) + ")";
    if (auto *ds = dynamic_cast<const DegenerateStep *>(&e))
        return std::string("DegenerateStep: ") + ds->what() + " (best mu " + fmt(ds->best_mu) + ")";
    return e.what();
}

}  // namespace detail

/// Executes every run: ED references first (one per distinct model and
/// fragment), then the runs themselves. Failures are recorded per run.
inline std::vector<RunOutcome> execute(const ExperimentConfig &cfg, const RunOptions &opt) {
    std::vector<RunOutcome> out(cfg.runs.size());
    for (std::size_t k = 0; k < cfg.runs.size(); ++k) out[k].spec = cfg.runs[k];

    std::map<detail::RefKey, std::size_t> ref_slot;
    std::vector<const RunSpec *> ref_specs;
    if (cfg.ed_reference)
        for (const RunSpec &r : cfg.runs)
            if (ref_slot.emplace(detail::reference_key(r), ref_specs.size()).second) ref_specs.push_back(&r);
    std::vector<std::optional<double>> refs(ref_specs.size());
    std::vector<std::string> ref_errors(ref_specs.size());
    detail::parallel_for(ref_specs.size(), opt.workers, [&](std::size_t k) {
        try {
            DMETConfig ed;
            ed.max_iters = ref_specs[k]->dmet.max_iters;
            ed.mu0 = ref_specs[k]->dmet.mu0;
            ed.mu1 = ref_specs[k]->dmet.mu1;
            refs[k] = single_shot_run(ref_specs[k]->model, ref_specs[k]->fragment, ed).energy_per_site;
        } catch (const std::exception &e) {
            ref_errors[k] = detail::describe(e);
        }
    });

    detail::parallel_for(out.size(), opt.workers, [&](std::size_t k) {
        RunOutcome &o = out[k];
        if (cfg.ed_reference) {
            std::size_t slot = ref_slot.at(detail::reference_key(o.spec));
            o.reference = refs[slot];
            o.reference_error = ref_errors[slot];
        }
        auto t0 = std::chrono::steady_clock::now();
        try {
            o.result = single_shot_run(o.spec.model, o.spec.fragment, o.spec.dmet);
        } catch (const std::exception &e) {
            o.error = detail::describe(e);
        }
        o.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    return out;
}

inline void write_outputs(const ExperimentConfig &cfg, const std::vector<RunOutcome> &rows, const fs::path &dir, bool timings) {
    for (const RunOutcome &o : rows) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%04zu.json", o.spec.index);
        write_atomic(dir / "runs" / name, run_json(cfg, o, timings).dump(2) + "\n");
    }
    nlohmann::json manifest = {{"version", kVersion}, {"config_hash", cfg.hash}, {"runs", rows.size()}, {"config", cfg.source}};
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    write_atomic(dir / cfg.csv_name, csv_text(cfg, rows, timings));
}

/// Gnuplot scripts for energy against filling, energy and double occupancy
/// against U, and relative error against filling.
inline void write_plots(const ExperimentConfig &cfg, const fs::path &dir) {
    const std::string head = "# dmetvqe " + std::string(kVersion) + " config " + cfg.hash + "\n" +
                             "set datafile separator ','\nset datafile commentschars '#'\nset key outside right\n";
    const std::string csv = "'../" + cfg.csv_name + "'";
    std::set<double> Us, fills;
    std::set<int> frags;
    for (const RunSpec &r : cfg.runs) Us.insert(r.model.U), fills.insert(r.n_bar), frags.insert(r.fragment.size());
    // One curve per (outer value, fragment size); column numbers follow csv_columns().
    auto series = [&](const std::string &x, const std::string &y, const std::set<double> &outer, const std::string &outer_col,
                      const std::string &label) {
        std::string s = "plot ";
        for (double o : outer)
            for (int nf : frags) {
                if (s.size() > 5) s += ", \\\n     ";
                s += csv + " using (($" + outer_col + "==" + fmt(o) + " && $9==" + std::to_string(nf) + ") ? $" + x + " : NaN):" +
                     y + " with linespoints title '" + label + "=" + fmt(o) + " N_frag=" + std::to_string(nf) + "'";
            }
        return s + "\n";
    };
    write_atomic(dir / "plots" / "energy_vs_filling.gp", head + "set xlabel 'n'\nset ylabel 'E / site'\n" + series("7", "18", Us, "6", "U"));
    write_atomic(dir / "plots" / "energy_vs_U.gp", head + "set xlabel 'U'\nset ylabel 'E / site'\n" + series("6", "18", fills, "7", "n"));
    write_atomic(dir / "plots" / "double_occ_vs_U.gp",
                 head + "set xlabel 'U'\nset ylabel 'D / site'\n" + series("6", "19", fills, "7", "n"));
    write_atomic(dir / "plots" / "rel_error_vs_filling.gp",
                 head + "set logscale y\nset xlabel 'n'\nset ylabel 'relative error'\n" + series("7", "21", Us, "6", "U"));
}

}  // namespace dmetvqe::runner

#endif  // DMETVQE_TOOLS_RUNNER_HPP
