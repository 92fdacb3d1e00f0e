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

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmetvqe/config.hpp"
#include "dmetvqe/report.hpp"
#include "runner.hpp"
#include "verify_suites.hpp"

namespace {

using namespace dmetvqe;
namespace fs = std::filesystem;

constexpr int kOk = 0, kConfigError = 1, kVerifyFailure = 2, kRunFailure = 3;

/// Loads a config, applying the --seed override to the raw document so the
/// hash describes what actually ran.
ExperimentConfig load(const std::string &path, std::optional<std::uint64_t> seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    if (!seed) return parse_config_text(ss.str());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str(), nullptr, true, true);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("parse error at " + dmetvqe::detail::line_col(ss.str(), e.byte) + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: expected an object");
    j["solver"]["seeds"] = {*seed};
    if (j.contains("sweep") && j["sweep"].is_object()) j["sweep"].erase("seed");
    return expand_config(j);
}

int cmd_run(const std::string &path, int workers, std::optional<std::uint64_t> seed, const std::string &out_flag, bool plots,
            bool timings) {
    ExperimentConfig cfg;
    try {
        cfg = load(path, seed);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    const fs::path dir = out_flag.empty() ? fs::path(cfg.out_dir) : fs::path(out_flag);
    std::cerr << "dmetvqe " << kVersion << " config " << cfg.hash << ": " << cfg.runs.size() << " runs, " << workers
              << " workers\n";
    runner::RunOptions opt;
    opt.workers = workers;
    opt.timings = timings;
    std::vector<runner::RunOutcome> rows;
    try {
        rows = runner::execute(cfg, opt);
        runner::write_outputs(cfg, rows, dir, timings);
        if (plots) runner::write_plots(cfg, dir);
    } catch (const std::exception &e) {
        std::cerr << "run failure: " << e.what() << "\n";
        return kRunFailure;
    }
    int failed = 0;
    for (const auto &o : rows)
        if (!o.error.empty()) {
            ++failed;
            std::cerr << "run " << o.spec.index << " failed: " << o.error << "\n";
        }
    std::cerr << "wrote " << (dir / cfg.csv_name).string() << "\n";
    return failed ? kRunFailure : kOk;
}

int cmd_schedule(const std::string &what, const std::string &out_flag) {
    std::vector<std::pair<Geometry, FragmentSpec>> geoms;
    std::string hash = "table1";
    if (what == "table1") {
        geoms = table1_geometries();
    } else {
        ExperimentConfig cfg;
        try {
            cfg = load_config(what);
        } catch (const ConfigError &e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kConfigError;
        }
        hash = cfg.hash;
        for (const RunSpec &r : cfg.runs) {
            auto g = std::make_pair(geometry_of(r.model, r.fragment), r.fragment);
            bool seen = false;
            for (const auto &x : geoms) seen = seen || (x.first == g.first && x.second.Nx == g.second.Nx && x.second.Ny == g.second.Ny);
            if (!seen) geoms.push_back(g);
        }
    }
    nlohmann::json doc = {{"version", kVersion}, {"config_hash", hash}, {"schedules", nlohmann::json::array()}};
    bool all_ok = true;
    std::cout << std::left << std::setw(8) << "geometry" << std::setw(9) << "fragment" << std::setw(16) << "depth/formula"
              << std::setw(8) << "" << std::setw(16) << "meas/formula" << "\n";
    for (auto [g, f] : geoms) {
        ScheduleCheck c;
        try {
            c = check_schedule(g, f);
        } catch (const Error &e) {
            std::cerr << "unsupported geometry " << to_string(g) << " " << fragment_label(f) << ": " << e.what() << "\n";
            return kRunFailure;
        }
        all_ok = all_ok && c.ok();
        std::cout << std::setw(8) << to_string(g) << std::setw(9) << fragment_label(f) << std::setw(16)
                  << (std::to_string(c.depth) + "/" + std::to_string(c.formula_depth)) << std::setw(8)
                  << (c.depth_ok() ? "PASS" : "FAIL") << std::setw(16)
                  << (std::to_string(c.measurements) + "/" + std::to_string(c.formula_measurements))
                  << (c.measurements_ok() ? "PASS" : "FAIL") << "\n";
        doc["schedules"].push_back(schedule_json(c));
    }
    const fs::path dir = out_flag.empty() ? fs::path("out") : fs::path(out_flag);
    try {
        runner::write_atomic(dir / "schedule.json", doc.dump(2) + "\n");
    } catch (const std::exception &e) {
        std::cerr << "run failure: " << e.what() << "\n";
        return kRunFailure;
    }
    std::cerr << "wrote " << (dir / "schedule.json").string() << "\n";
    return all_ok ? kOk : kVerifyFailure;
}

int cmd_verify(const std::string &suite, const std::string &mutate) {
    if (!mutate.empty()) {
        if (mutate != "fswap-sign") {
            std::cerr << "unknown mutation '" << mutate << "'\n";
            return kConfigError;
        }
        fault_fswap_sign = true;
        std::cout << "mutation active: fswap-sign\n";
    }
    int failed = 0, total = 0, matched = 0;
    for (const auto &s : verify::all_suites()) {
        if (!suite.empty() && suite != "all" && suite != s.name) continue;
        ++matched;
        std::vector<verify::Check> checks;
        try {
            checks = s.run();
        } catch (const std::exception &e) {
            checks.push_back({"suite raised", false, e.what()});
        }
        int bad = 0;
        for (const auto &c : checks) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << s.name << ": " << c.name;
            if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
            std::cout << "\n";
            bad += !c.pass;
        }
        std::cout << "suite " << s.name << ": " << checks.size() - bad << "/" << checks.size() << " passed\n";
        failed += bad;
        total += static_cast<int>(checks.size());
    }
    if (matched == 0) {
        std::cerr << "unknown suite '" << suite << "'\n";
        return kConfigError;
    }
    std::cout << "summary: " << total - failed << "/" << total << " checks passed\n";
    return failed ? kVerifyFailure : kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"DMET with a Hamiltonian-variational VQE solver for the Hubbard model"};
    app.set_version_flag("--version", std::string(dmetvqe::kVersion));
    app.require_subcommand(1);

    int workers = 1;
    std::optional<std::uint64_t> seed;
    std::string out_dir, config, suite, mutate;
    bool plots = false, timings = false;

    auto *run = app.add_subcommand("run", "execute every run of a config");
    run->add_option("config", config, "config file (JSON)")->required();
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "replace the config's seeds with this one");
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_flag("--emit-plots", plots, "write gnuplot scripts next to the CSV");
    run->add_flag("--timings", timings, "record wall times (makes the CSV non-reproducible)");

    auto *sched = app.add_subcommand("schedule", "emit ansatz and measurement schedules with count checks");
    sched->add_option("config", config, "config file, or 'table1' for every table geometry")->required();
    sched->add_option("--out", out_dir, "output directory");

    auto *ver = app.add_subcommand("verify", "run invariant suites");
    ver->add_option("suite", suite, "model, meanfield, embedding, oracle, ansatz, measure, solver, dmet or all");
    ver->add_option("--mutate", mutate, "inject a fault (fswap-sign)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kConfigError;
    }
    if (*run) return cmd_run(config, workers, seed, out_dir, plots, timings);
    if (*sched) return cmd_schedule(config, out_dir);
    return cmd_verify(suite, mutate);
}
