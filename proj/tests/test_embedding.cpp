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

#include "dmetvqe/ansatz.hpp"
#include "dmetvqe/embedding.hpp"
#include "oracles.hpp"

namespace dmetvqe {
namespace {

HubbardSpec chain240(int n_occ, Boundary b = Boundary::AntiPeriodic) { return HubbardSpec::chain(240, 1.0, 4.0, b, n_occ); }

TEST(Embedding, ProjectorIsOrthonormalWithFragmentIdentityBlock) {
    Embedding e = embed(chain240(120), FragmentSpec::line(3));
    const Eigen::MatrixXd &P = e.projector.P;
    ASSERT_EQ(P.rows(), 240);
    ASSERT_EQ(P.cols(), 6);
    EXPECT_LT((P.transpose() * P - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(P(i, i), 1.0);
    EXPECT_LT(P.block(0, 3, 3, 3).norm(), 1e-15);
}

TEST(Embedding, QuarterFilledChainEmbedsFourElectronsForTwoSites) {
    Embedding e = embed(chain240(120), FragmentSpec::line(2));
    EXPECT_EQ(e.projector.N_emb, 4);
    EXPECT_EQ(e.hamiltonian(0.0).n_up(), 2);
}

TEST(Embedding, EmbeddedMeanFieldReproducesTheLatticeDensity) {
    // The N_emb-electron ground state of K_emb is the lattice determinant
    // restricted to the embedding space.
    for (FragmentSpec f : {FragmentSpec::line(1), FragmentSpec::line(2), FragmentSpec::line(4)}) {
        Embedding e = embed(chain240(120), f);
        Eigen::MatrixXd want = e.projector.P.transpose() * e.rho * e.projector.P;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.K_emb);
        Eigen::MatrixXd C = es.eigenvectors().leftCols(e.projector.N_emb / 2);
        EXPECT_LT((C * C.transpose() - want).norm(), 1e-9) << "N_frag=" << f.size();
    }
}

TEST(Embedding, BathParitySplitHoldsUnderTheClosedShellCondition) {
    for (int nf = 2; nf <= 4; ++nf) {
        // N_occ/2 even with anti-periodic, N_occ/2 odd with periodic boundaries.
        EXPECT_LT(cross_group_coupling(embed(chain240(240), FragmentSpec::line(nf)).K_emb, parity_groups(nf)), 1e-10);
        EXPECT_LT(cross_group_coupling(embed(chain240(242, Boundary::Periodic), FragmentSpec::line(nf)).K_emb, parity_groups(nf)),
                  1e-10);
        EXPECT_LT(cross_group_coupling(embed(chain240(120), FragmentSpec::line(nf)).K_emb, parity_groups(nf)), 1e-10);
    }
}

TEST(Embedding, BathParitySplitBreaksWhenThePairingIsViolated) {
    for (int nf = 2; nf <= 4; ++nf) {
        EXPECT_GT(cross_group_coupling(embed(chain240(240, Boundary::Periodic), FragmentSpec::line(nf)).K_emb, parity_groups(nf)),
                  1e-6);
        EXPECT_GT(cross_group_coupling(embed(chain240(238), FragmentSpec::line(nf)).K_emb, parity_groups(nf)), 1e-6);
    }
}

TEST(Embedding, StructureOfTheChain) {
    Embedding e = embed(chain240(240), FragmentSpec::line(4));
    TermStructure s = analyze_structure(e.K_emb);
    EXPECT_EQ(s.n_frag, 4);
    EXPECT_EQ(s.frag_frag.size(), 3u);
    EXPECT_EQ(s.edge_orbitals, (std::vector<int>{0, 3}));
    ASSERT_EQ(s.bath_groups.size(), 2u);
    EXPECT_EQ(s.bath_groups[0].size(), 2u);
    EXPECT_EQ(s.bath_groups[1].size(), 2u);
    for (const HoppingTerm &t : s.frag_bath) EXPECT_TRUE(t.i == 0 || t.i == 3);
}

TEST(Embedding, StructureOfALineFragmentInTheSquareLattice) {
    Embedding e = embed(HubbardSpec::square(20, 24, 1.0, 4.0, Boundary::AntiPeriodic, 480), FragmentSpec::rect(1, 3));
    TermStructure s = analyze_structure(e.K_emb);
    EXPECT_EQ(s.edge_orbitals.size(), 3u);
    EXPECT_EQ(s.frag_frag.size(), 2u);
}

TEST(Embedding, LowFillingKeepsEveryBathOrbital) {
    // At n = 0.05 one bath orbital is occupied to within ~1e-9 of one.
    for (double fill : {0.05, 0.1}) {
        Embedding e = embed(chain240(occupation_from_filling(fill, 240)), FragmentSpec::line(4));
        EXPECT_EQ(e.projector.V.cols(), 4);
        EXPECT_LT(e.projector.eps_used, 1e-7 + 1e-20);
    }
}

TEST(Embedding, HamiltonianCarriesTheChemicalPotentialOnTheFragmentOnly) {
    Embedding e = embed(chain240(240), FragmentSpec::line(2));
    EmbeddedHamiltonian H = e.hamiltonian(0.75);
    Eigen::MatrixXd d = H.quadratic() - e.K_emb;
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(d(i, i), i < 2 ? -0.75 : 0.0);
    EXPECT_EQ(H.qubits(), 8);
}

}  // namespace
}  // namespace dmetvqe
