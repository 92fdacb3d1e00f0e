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

#ifndef DMETVQE_TOOLS_VERIFY_SUITES_HPP
#define DMETVQE_TOOLS_VERIFY_SUITES_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dmetvqe/dmet.hpp"
#include "dmetvqe/report.hpp"
#include "oracles.hpp"

namespace dmetvqe::verify {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Suite {
    std::string name;
    std::function<std::vector<Check>()> run;
};

namespace detail {

inline std::string num(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

inline Check below(std::string name, double value, double bound) {
    return {std::move(name), value < bound, num(value) + " < " + num(bound)};
}

}  // namespace detail

inline std::vector<Check> model_suite() {
    std::vector<Check> out;
    for (Boundary b : {Boundary::Periodic, Boundary::AntiPeriodic}) {
        HubbardSpec s = HubbardSpec::square(4, 6, 1.0, 0.0, b, 24);
        Eigen::MatrixXd T = build_hopping_matrix(s);
        out.push_back(detail::below(std::string("hopping matrix symmetric, ") + to_string(b), (T - T.transpose()).norm(), 1e-14));
        Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues();
        double want = oracle::torus_energy_per_site(4, 6, 24, 1.0, b == Boundary::AntiPeriodic);
        out.push_back(detail::below(std::string("2D spectrum matches the dispersion, ") + to_string(b),
                                    std::abs(2.0 * ev.head(12).sum() / 24 - want), 1e-12));
    }
    return out;
}

inline std::vector<Check> meanfield_suite() {
    std::vector<Check> out;
    HubbardSpec s = HubbardSpec::chain(240, 1.0, 0.0, Boundary::AntiPeriodic, 240);
    SlaterMatrix m = lowest_eigenvectors(build_hopping_matrix(s), 120);
    Eigen::MatrixXd rho = one_rdm(m.phi);
    out.push_back(detail::below("1-RDM idempotent", (rho * rho - rho).norm(), 1e-10));
    out.push_back(detail::below("1-RDM trace", std::abs(rho.trace() - 120.0), 1e-10));
    out.push_back(detail::below("energy matches the dispersion",
                                std::abs(meanfield_energy(m) / 240 - oracle::ring_energy_per_site(240, 240, 1.0, true)), 1e-12));
    return out;
}

inline std::vector<Check> embedding_suite() {
    std::vector<Check> out;
    for (int nf = 2; nf <= 4; ++nf) {
        auto split = [&](Boundary b, int n_occ) {
            return cross_group_coupling(embed(HubbardSpec::chain(240, 1.0, 4.0, b, n_occ), FragmentSpec::line(nf)).K_emb,
                                        parity_groups(nf));
        };
        const std::string tag = "N_frag=" + std::to_string(nf);
        out.push_back(detail::below("bath parity split, anti-periodic even, " + tag, split(Boundary::AntiPeriodic, 240), 1e-10));
        out.push_back(detail::below("bath parity split, periodic odd, " + tag, split(Boundary::Periodic, 242), 1e-10));
        double broken = split(Boundary::Periodic, 240);
        out.push_back({"parity split absent when pairing violated, " + tag, broken > 1e-6, detail::num(broken) + " > 1e-06"});
    }
    Embedding e = embed(HubbardSpec::square(20, 24, 1.0, 4.0, Boundary::AntiPeriodic, 480), FragmentSpec::rect(2, 2));
    const Eigen::MatrixXd &P = e.projector.P;
    out.push_back(detail::below("2D projector orthonormal",
                                (P.transpose() * P - Eigen::MatrixXd::Identity(P.cols(), P.cols())).norm(), 1e-10));
    return out;
}

/// Realized circuits against the ordered product of term exponentials.
inline std::vector<Check> oracle_suite() {
    std::vector<Check> out;
    std::mt19937_64 rng(20260);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (int nf : {1, 2})
        for (Variant var : {Variant::HVMin, Variant::HVMax})
            for (int depth : {1, 2, 3}) {
                Embedding e = embed(HubbardSpec::chain(12, 1.0, 4.0, Boundary::AntiPeriodic, 6), FragmentSpec::line(nf));
                EmbeddedHamiltonian H = e.hamiltonian(0.7);
                VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(nf));
                Circuit c = solver.circuit(H, var, depth);
                ParamBinding b = bind(solver.schedule(), var, solver.structure(), H.mu);
                double worst = 0.0;
                for (int trial = 0; trial < 10; ++trial) {
                    std::vector<double> theta(c.n_slots);
                    for (double &t : theta) t = angle(rng);
                    Eigen::VectorXcd v0 = oracle::random_state(c.n_qubits, rng);
                    StateVector s(c.n_qubits);
                    for (Eigen::Index k = 0; k < v0.size(); ++k) s.amp[k] = v0(k);
                    run_circuit(c, theta, s);
                    Eigen::VectorXcd got = Eigen::Map<Eigen::VectorXcd>(s.amp.data(), v0.size());
                    worst = std::max(worst, oracle::infidelity(got, oracle::ansatz_state(solver.schedule(), b, H.U, depth, theta, v0)));
                }
                out.push_back(detail::below("N_frag=" + std::to_string(nf) + " " + to_string(var) + " depth " + std::to_string(depth),
                                            worst, 1e-9));
            }
    return out;
}

/// Generated counts against the closed forms for every table geometry.
inline std::vector<Check> ansatz_suite() {
    std::vector<Check> out;
    for (auto [g, f] : table1_geometries()) {
        ScheduleCheck c = check_schedule(g, f);
        std::string tag = std::string(to_string(g)) + " " + fragment_label(f);
        out.push_back({tag + " depth", c.depth_ok(), std::to_string(c.depth) + " vs " + std::to_string(c.formula_depth)});
        out.push_back({tag + " measurements", c.measurements_ok(),
                       std::to_string(c.measurements) + " vs " + std::to_string(c.formula_measurements)});
    }
    ScheduleCheck c44 = check_schedule(Geometry::Rect2D, FragmentSpec::rect(4, 4));
    out.push_back({"4x4 depth is 30", c44.depth == 30, std::to_string(c44.depth)});
    return out;
}

/// Plan coverage and exact-probability evaluation of the estimator.
inline std::vector<Check> measure_suite() {
    std::vector<Check> out;
    std::mt19937_64 rng(77);
    for (auto [dim, nf] : std::vector<std::pair<int, FragmentSpec>>{{1, FragmentSpec::line(1)},
                                                                    {1, FragmentSpec::line(2)},
                                                                    {1, FragmentSpec::line(3)},
                                                                    {2, FragmentSpec::rect(1, 2)},
                                                                    {2, FragmentSpec::rect(2, 2)}}) {
        HubbardSpec spec = dim == 1 ? HubbardSpec::chain(24, 1.0, 4.0, Boundary::AntiPeriodic, 12)
                                    : HubbardSpec::square(8, 8, 1.0, 4.0, Boundary::AntiPeriodic, 32);
        Embedding e = embed(spec, nf);
        EmbeddedHamiltonian H = e.hamiltonian(0.3);
        VQESolver solver(analyze_structure(e.K_emb), geometry_of(spec, nf), nf);
        const MeasurementPlan &plan = solver.plan();
        std::map<std::pair<int, int>, int> seen;
        bool crossing = false;
        for (const auto &r : plan.rounds) {
            for (auto t : r.terms) ++seen[t];
            for (std::size_t a = 0; a < r.pairs.size(); ++a)
                for (std::size_t b = a + 1; b < r.pairs.size(); ++b) crossing = crossing || crosses(r.pairs[a], r.pairs[b]);
        }
        bool covered = true;
        for (const HoppingTerm &t : solver.structure().hopping()) covered = covered && seen[{t.i, t.j}] == 1;
        covered = covered && seen.size() == solver.structure().hopping().size();
        const std::string tag = std::string(to_string(geometry_of(spec, nf))) + " " + fragment_label(nf);
        out.push_back({tag + " every hopping term read exactly once", covered, ""});
        out.push_back({tag + " no crossing pairs", !crossing, ""});
        Circuit c = solver.circuit(H, Variant::HVMin, 2);
        std::vector<double> theta(c.n_slots);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            for (double &t : theta) t = u(rng);
            StateVector s = VQESolver::state(c, solver.initial_state(H), theta);
            EstimatorOptions opt;
            opt.exact = true;
            worst = std::max(worst, std::abs(estimate_energy(H, plan, s, opt).energy - expectation(H, s, solver.layout())));
        }
        out.push_back(detail::below(tag + " exact-probability energy", worst, 1e-10));
    }
    return out;
}

inline std::vector<Check> solver_suite() {
    std::vector<Check> out;
    for (int nf : {1, 2}) {
        Embedding e = embed(HubbardSpec::chain(24, 1.0, 4.0, Boundary::AntiPeriodic, 12), FragmentSpec::line(nf));
        EmbeddedHamiltonian H = e.hamiltonian(1.1);
        double want = oracle::sector_ground_energy(oracle::dense_hamiltonian(H.quadratic(), H.U, H.n_frag), H.orbitals(),
                                                   H.n_up(), H.n_down());
        out.push_back(detail::below("ED matches dense diagonalization, N_frag=" + std::to_string(nf),
                                    std::abs(exact_diagonalize(H).energy - want), 1e-9));
    }
    OptimizeResult r = quasi_newton_minimize([](const std::vector<double> &x) { return oracle::rosenbrock(x); }, {-1.2, 1.0, -0.5});
    out.push_back(detail::below("quasi-Newton on Rosenbrock", std::abs(r.theta[0] - 1.0) + std::abs(r.theta[2] - 1.0), 1e-4));
    return out;
}

/// U = 0: DMET with the ED solver reproduces the mean-field energy.
inline std::vector<Check> dmet_suite() {
    std::vector<Check> out;
    DMETConfig cfg;
    for (int nf = 1; nf <= 4; ++nf) {
        HubbardSpec s = HubbardSpec::chain(240, 1.0, 0.0, Boundary::AntiPeriodic, 240);
        DMETResult r = single_shot_run(s, FragmentSpec::line(nf), cfg);
        double mf = oracle::ring_energy_per_site(240, 240, 1.0, true);
        out.push_back(detail::below("1D U=0 N_frag=" + std::to_string(nf), std::abs(r.energy_per_site - mf), 1e-8));
        if (nf == 1) out.push_back(detail::below("1D U=0 near -4/pi", std::abs(r.energy_per_site + 4.0 / std::numbers::pi), 2e-3));
    }
    for (FragmentSpec f : {FragmentSpec::rect(1, 2), FragmentSpec::rect(2, 2)}) {
        HubbardSpec s = HubbardSpec::square(20, 24, 1.0, 0.0, Boundary::AntiPeriodic, 480);
        DMETResult r = single_shot_run(s, f, cfg);
        double mf = oracle::torus_energy_per_site(20, 24, 480, 1.0, true);
        out.push_back(detail::below("2D U=0 " + fragment_label(f), std::abs(r.energy_per_site - mf), 1e-8));
    }
    return out;
}

inline std::vector<Suite> all_suites() {
    return {{"model", model_suite},   {"meanfield", meanfield_suite}, {"embedding", embedding_suite},
            {"oracle", oracle_suite}, {"ansatz", ansatz_suite},       {"measure", measure_suite},
            {"solver", solver_suite}, {"dmet", dmet_suite}};
}

}  // namespace dmetvqe::verify

#endif  // DMETVQE_TOOLS_VERIFY_SUITES_HPP
