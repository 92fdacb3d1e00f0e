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

#include "dmetvqe/model.hpp"
#include "oracles.hpp"

namespace dmetvqe {
namespace {

TEST(Model, ChainHoppingHasNearestNeighbourBonds) {
    Eigen::MatrixXd T = build_hopping_matrix(HubbardSpec::chain(6, 1.5, 0.0, Boundary::Periodic, 6));
    for (int i = 0; i < 6; ++i) {
        EXPECT_DOUBLE_EQ(T(i, (i + 1) % 6), -1.5);
        EXPECT_DOUBLE_EQ(T(i, i), 0.0);
    }
    EXPECT_DOUBLE_EQ(T(0, 3), 0.0);
}

TEST(Model, AntiPeriodicBoundaryFlipsTheWrapBond) {
    Eigen::MatrixXd T = build_hopping_matrix(HubbardSpec::chain(6, 1.0, 0.0, Boundary::AntiPeriodic, 6));
    EXPECT_DOUBLE_EQ(T(0, 5), 1.0);
    EXPECT_DOUBLE_EQ(T(5, 0), 1.0);
    EXPECT_DOUBLE_EQ(T(0, 1), -1.0);
}

TEST(Model, SpectraMatchTheDispersion) {
    for (Boundary b : {Boundary::Periodic, Boundary::AntiPeriodic}) {
        const bool ap = b == Boundary::AntiPeriodic;
        Eigen::MatrixXd T1 = build_hopping_matrix(HubbardSpec::chain(30, 1.0, 0.0, b, 30));
        Eigen::VectorXd e1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T1).eigenvalues();
        EXPECT_NEAR(2.0 * e1.head(10).sum() / 30, oracle::ring_energy_per_site(30, 20, 1.0, ap), 1e-12);
        Eigen::MatrixXd T2 = build_hopping_matrix(HubbardSpec::square(5, 6, 1.0, 0.0, b, 30));
        Eigen::VectorXd e2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T2).eigenvalues();
        EXPECT_NEAR(2.0 * e2.head(12).sum() / 30, oracle::torus_energy_per_site(5, 6, 24, 1.0, ap), 1e-12);
    }
}

TEST(Model, SquareLatticeCouplesFourNeighbours) {
    HubbardSpec s = HubbardSpec::square(4, 5, 1.0, 0.0, Boundary::Periodic, 20);
    Eigen::MatrixXd T = build_hopping_matrix(s);
    for (int i = 0; i < s.num_sites(); ++i) EXPECT_DOUBLE_EQ(T.row(i).sum(), -4.0);
    EXPECT_DOUBLE_EQ(T(0, 1), -1.0);  // (0,0)-(0,1)
    EXPECT_DOUBLE_EQ(T(0, 5), -1.0);  // (0,0)-(1,0)
}

TEST(Model, FillingRoundsToAnEvenCount) {
    EXPECT_EQ(occupation_from_filling(1.0, 240), 240);
    EXPECT_EQ(occupation_from_filling(0.5, 240), 120);
    EXPECT_EQ(occupation_from_filling(0.05, 240), 12);
    EXPECT_EQ(occupation_from_filling(0.1, 10), 2);
    EXPECT_EQ(occupation_from_filling(0.3, 10), 2);  // 3 is odd; 2 and 4 tie, the lower is taken
    for (int k = 1; k <= 20; ++k) EXPECT_EQ(occupation_from_filling(0.05 * k, 240) % 2, 0);
}

TEST(Model, ValidationRejectsBadSpecs) {
    EXPECT_THROW(HubbardSpec::chain(240, 1.0, 4.0, Boundary::Periodic, 121).validate(), SpecError);
    EXPECT_THROW(HubbardSpec::chain(240, 1.0, 4.0, Boundary::Periodic, 0).validate(), SpecError);
    EXPECT_THROW(validate(HubbardSpec::chain(8, 1.0, 4.0, Boundary::Periodic, 8), FragmentSpec::line(5)), SpecError);
    EXPECT_THROW(validate(HubbardSpec::square(8, 8, 1.0, 4.0, Boundary::Periodic, 64), FragmentSpec::rect(3, 2)), SpecError);
    EXPECT_NO_THROW(validate(HubbardSpec::square(20, 24, 1.0, 4.0, Boundary::AntiPeriodic, 480), FragmentSpec::rect(2, 3)));
    EXPECT_THROW(parse_boundary("twisted"), SpecError);
}

TEST(Model, GeometryAndEdgeSites) {
    HubbardSpec chain = HubbardSpec::chain(240, 1.0, 4.0, Boundary::AntiPeriodic, 240);
    HubbardSpec square = HubbardSpec::square(20, 24, 1.0, 4.0, Boundary::AntiPeriodic, 480);
    EXPECT_EQ(geometry_of(chain, FragmentSpec::line(3)), Geometry::Chain1D);
    EXPECT_EQ(geometry_of(square, FragmentSpec::rect(1, 3)), Geometry::Line2D);
    EXPECT_EQ(geometry_of(square, FragmentSpec::rect(3, 3)), Geometry::Rect2D);
    EXPECT_EQ(edge_count(chain, FragmentSpec::line(1)), 1);
    EXPECT_EQ(edge_count(chain, FragmentSpec::line(5)), 2);
    EXPECT_EQ(edge_count(square, FragmentSpec::rect(1, 4)), 4);
    EXPECT_EQ(edge_count(square, FragmentSpec::rect(3, 3)), 8);
    EXPECT_EQ(edge_count(square, FragmentSpec::rect(4, 4)), 12);
    EXPECT_EQ(fragment_sites(square, FragmentSpec::rect(2, 2)), (std::vector<int>{0, 1, 24, 25}));
}

}  // namespace
}  // namespace dmetvqe
