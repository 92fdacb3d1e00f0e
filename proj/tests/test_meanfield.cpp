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

#include <numbers>

#include "dmetvqe/meanfield.hpp"
#include "dmetvqe/model.hpp"
#include "oracles.hpp"

namespace dmetvqe {
namespace {

TEST(MeanField, DensityMatrixIsAProjector) {
    HubbardSpec s = HubbardSpec::square(20, 24, 1.0, 0.0, Boundary::AntiPeriodic, 240);
    SlaterMatrix m = lowest_eigenvectors(build_hopping_matrix(s), 120);
    Eigen::MatrixXd rho = one_rdm(m.phi);
    EXPECT_LT((rho * rho - rho).norm(), 1e-10);
    EXPECT_NEAR(rho.trace(), 120.0, 1e-10);
    EXPECT_LT((rho - rho.transpose()).norm(), 1e-14);
}

TEST(MeanField, HalfFilledChainApproachesTheThermodynamicLimit) {
    HubbardSpec s = HubbardSpec::chain(240, 1.0, 0.0, Boundary::AntiPeriodic, 240);
    SlaterMatrix m = lowest_eigenvectors(build_hopping_matrix(s), 120);
    EXPECT_NEAR(meanfield_energy(m) / 240, oracle::ring_energy_per_site(240, 240, 1.0, true), 1e-12);
    EXPECT_NEAR(meanfield_energy(m) / 240, -4.0 / std::numbers::pi, 2e-3);
    EXPECT_FALSE(m.fermi_degenerate);
}

TEST(MeanField, OpenShellIsFlagged) {
    // Periodic half filling: the Fermi level sits on a +-k pair.
    SlaterMatrix open = lowest_eigenvectors(build_hopping_matrix(HubbardSpec::chain(240, 1.0, 0.0, Boundary::Periodic, 240)), 120);
    EXPECT_TRUE(open.fermi_degenerate);
    SlaterMatrix closed = lowest_eigenvectors(build_hopping_matrix(HubbardSpec::chain(240, 1.0, 0.0, Boundary::Periodic, 242)), 121);
    EXPECT_FALSE(closed.fermi_degenerate);
}

TEST(MeanField, EigenvaluesAscend) {
    SlaterMatrix m = lowest_eigenvectors(build_hopping_matrix(HubbardSpec::chain(16, 1.0, 0.0, Boundary::AntiPeriodic, 8)), 4);
    for (int k = 1; k < m.eigenvalues.size(); ++k) EXPECT_LE(m.eigenvalues(k - 1), m.eigenvalues(k));
    EXPECT_EQ(m.phi.cols(), 4);
}

}  // namespace
}  // namespace dmetvqe
