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

#include <gtest/gtest.h>

#include <random>

#include "dmetvqe/solver.hpp"
#include "oracles.hpp"

namespace dmetvqe {
namespace {

EmbeddedHamiltonian chain_hamiltonian(int nf, double U, int n_occ, double mu) {
    return embed(HubbardSpec::chain(24, 1.0, U, Boundary::AntiPeriodic, n_occ), FragmentSpec::line(nf)).hamiltonian(mu);
}

TEST(Solver, ExactDiagonalizationMatchesDenseSpectrum) {
    for (int nf : {1, 2})
        for (int n_occ : {6, 12}) {
            EmbeddedHamiltonian H = chain_hamiltonian(nf, 4.0, n_occ, 0.8);
            double want = oracle::sector_ground_energy(oracle::dense_hamiltonian(H.quadratic(), H.U, H.n_frag), H.orbitals(),
                                                       H.n_up(), H.n_down());
            EDResult r = exact_diagonalize(H);
            EXPECT_NEAR(r.energy, want, 1e-9) << nf << " " << n_occ;
            EXPECT_NEAR(expectation(H, r.state, QubitLayout::identity(H.orbitals())), r.energy, 1e-9);
        }
}

TEST(Solver, SectorHamiltonianIsLayoutIndependent) {
    EmbeddedHamiltonian H = chain_hamiltonian(2, 2.0, 12, 0.3);
    double a = exact_diagonalize(H).energy;
    double b = exact_diagonalize(H, QubitLayout::from_line({3, 1, 0, 2})).energy;
    EXPECT_NEAR(a, b, 1e-10);
}

TEST(Solver, LanczosFindsTheLowestEigenvalue) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    const int n = 300;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = g(rng) * 3.0;
        for (int k = 1; k <= 3 && i + k < n; ++k) A(i, i + k) = A(i + k, i) = g(rng);
    }
    Eigen::SparseMatrix<double> S = A.sparseView();
    LanczosResult r = lanczos_lowest(S);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues()(0), 1e-9);
}

TEST(Solver, QuasiNewtonMinimizesRosenbrock) {
    OptimizeResult r = quasi_newton_minimize([](const std::vector<double> &x) { return oracle::rosenbrock(x); }, {-1.2, 1.0, -0.5, 0.3});
    for (double x : r.theta) EXPECT_NEAR(x, 1.0, 1e-4);
    EXPECT_LT(r.value, 1e-8);
}

TEST(Solver, SPSAApproachesTheMinimumOfAQuadratic) {
    auto f = [](const std::vector<double> &x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * (x[i] - 0.5) * (x[i] - 0.5);
        return s;
    };
    SPSAConfig cfg;
    cfg.a = 0.2;
    cfg.max_iters = 3000;
    cfg.seed = 4;
    OptimizeResult r = spsa_minimize(f, std::vector<double>(4, 0.0), cfg);
    EXPECT_LT(r.value, 1e-3);
    OptimizeResult again = spsa_minimize(f, std::vector<double>(4, 0.0), cfg);
    EXPECT_EQ(r.theta, again.theta);
}

TEST(Solver, DepthTwoSingleSiteReachesTheGroundState) {
    Embedding e = embed(HubbardSpec::chain(240, 1.0, 4.0, Boundary::AntiPeriodic, 240), FragmentSpec::line(1));
    EmbeddedHamiltonian H = e.hamiltonian(2.0);
    VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(1));
    VQEOptions opt;
    opt.depth = 2;
    opt.compute_fidelity = true;
    VQEResult r = solver.solve(H, opt);
    double ed = exact_diagonalize(H).energy;
    EXPECT_LT(std::abs((r.energy - ed) / ed), 1e-5);
    ASSERT_TRUE(r.fidelity.has_value());
    EXPECT_GT(*r.fidelity, 1.0 - 1e-4);
}

TEST(Solver, VariationalEnergyNeverUndercutsExactDiagonalization) {
    EmbeddedHamiltonian H = chain_hamiltonian(2, 4.0, 12, 2.0);
    Embedding e = embed(HubbardSpec::chain(24, 1.0, 4.0, Boundary::AntiPeriodic, 12), FragmentSpec::line(2));
    VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(2));
    VQEOptions opt;
    opt.depth = 1;
    VQEResult r = solver.solve(H, opt);
    EXPECT_GE(r.energy, exact_diagonalize(H).energy - 1e-10);
    EXPECT_LE(r.energy, expectation(H, solver.initial_state(H), solver.layout()) + 1e-12);
}

TEST(Solver, SampledModeRejectsTheQuasiNewtonOptimizer) {
    Embedding e = embed(HubbardSpec::chain(24, 1.0, 4.0, Boundary::AntiPeriodic, 12), FragmentSpec::line(1));
    VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(1));
    VQEOptions opt;
    opt.mode = VQEMode::Sampled;
    EXPECT_THROW(solver.solve(e.hamiltonian(0.0), opt), SpecError);
}

}  // namespace
}  // namespace dmetvqe
