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
#include <random>

#include "dmetvqe/report.hpp"
#include "dmetvqe/solver.hpp"
#include "oracles.hpp"

namespace dmetvqe {
namespace {

TEST(Ansatz, GeneratedCountsMatchTheClosedForms) {
    for (auto [g, f] : table1_geometries()) {
        if (g == Geometry::Chain1D && f.size() == 1) continue;
        ScheduleCheck c = check_schedule(g, f);
        EXPECT_EQ(c.depth, c.formula_depth) << to_string(g) << " " << fragment_label(f);
        EXPECT_EQ(c.measurements, c.formula_measurements) << to_string(g) << " " << fragment_label(f);
    }
}

TEST(Ansatz, SingleSiteChainUsesOneHoppingLayer) {
    ScheduleCheck c = check_schedule(Geometry::Chain1D, FragmentSpec::line(1));
    EXPECT_EQ(c.depth, 2);
    EXPECT_EQ(c.measurements, 2);
    ScheduleCheck line = check_schedule(Geometry::Line2D, FragmentSpec::rect(1, 1));
    EXPECT_EQ(line.depth, c.depth);
    EXPECT_EQ(line.measurements, c.measurements);
}

TEST(Ansatz, FourByFourFragmentHasDepthThirty) {
    EXPECT_EQ(check_schedule(Geometry::Rect2D, FragmentSpec::rect(4, 4)).depth, 30);
}

struct Case {
    int n_frag;
    Variant variant;
    int depth;
};

class OracleEquivalence : public ::testing::TestWithParam<Case> {};

TEST_P(OracleEquivalence, CircuitEqualsOrderedTermExponentials) {
    const Case k = GetParam();
    Embedding e = embed(HubbardSpec::chain(16, 1.0, 4.0, Boundary::AntiPeriodic, 8), FragmentSpec::line(k.n_frag));
    EmbeddedHamiltonian H = e.hamiltonian(-0.4);
    VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(k.n_frag));
    Circuit c = solver.circuit(H, k.variant, k.depth);
    ParamBinding b = bind(solver.schedule(), k.variant, solver.structure(), H.mu);
    std::mt19937_64 rng(1000 + 10 * k.n_frag + k.depth);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> theta(c.n_slots);
        for (double &t : theta) t = angle(rng);
        Eigen::VectorXcd v0 = oracle::random_state(c.n_qubits, rng);
        StateVector s(c.n_qubits);
        for (Eigen::Index i = 0; i < v0.size(); ++i) s.amp[i] = v0(i);
        run_circuit(c, theta, s);
        Eigen::VectorXcd got = Eigen::Map<Eigen::VectorXcd>(s.amp.data(), v0.size());
        worst = std::max(worst, oracle::infidelity(got, oracle::ansatz_state(solver.schedule(), b, H.U, k.depth, theta, v0)));
    }
    EXPECT_LT(worst, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Chain, OracleEquivalence,
                         ::testing::Values(Case{1, Variant::HVMin, 1}, Case{1, Variant::HVMin, 2}, Case{1, Variant::HVMax, 3},
                                           Case{2, Variant::HVMin, 1}, Case{2, Variant::HVMin, 2}, Case{2, Variant::HVMax, 1},
                                           Case{2, Variant::HVMax, 2}),
                         [](const ::testing::TestParamInfo<Case> &info) {
                             const Case &k = info.param;
                             return "Frag" + std::to_string(k.n_frag) + (k.variant == Variant::HVMin ? "Min" : "Max") + "Depth" +
                                    std::to_string(k.depth);
                         });

TEST(Ansatz, MutatedSwapSignIsDetectedAtOddDepth) {
    Embedding e = embed(HubbardSpec::chain(16, 1.0, 4.0, Boundary::AntiPeriodic, 8), FragmentSpec::line(2));
    EmbeddedHamiltonian H = e.hamiltonian(0.3);
    VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(2));
    Circuit c = solver.circuit(H, Variant::HVMin, 1);
    ParamBinding b = bind(solver.schedule(), Variant::HVMin, solver.structure(), H.mu);
    std::mt19937_64 rng(9);
    std::vector<double> theta(c.n_slots, 0.4);
    Eigen::VectorXcd v0 = oracle::random_state(c.n_qubits, rng);
    StateVector s(c.n_qubits);
    for (Eigen::Index i = 0; i < v0.size(); ++i) s.amp[i] = v0(i);
    fault_fswap_sign = true;
    run_circuit(c, theta, s);
    fault_fswap_sign = false;
    Eigen::VectorXcd got = Eigen::Map<Eigen::VectorXcd>(s.amp.data(), v0.size());
    EXPECT_GT(oracle::infidelity(got, oracle::ansatz_state(solver.schedule(), b, H.U, 1, theta, v0)), 1e-3);
}

TEST(Ansatz, SectorCircuitMatchesTheFullRegister) {
    Embedding e = embed(HubbardSpec::chain(16, 1.0, 4.0, Boundary::AntiPeriodic, 8), FragmentSpec::line(2));
    EmbeddedHamiltonian H = e.hamiltonian(0.9);
    VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(2));
    for (int depth : {1, 2, 3}) {
        Circuit c = solver.circuit(H, Variant::HVMax, depth);
        std::vector<double> theta(c.n_slots);
        std::mt19937_64 rng(depth);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (double &t : theta) t = u(rng);
        StateVector init = solver.initial_state(H);
        StateVector full = VQESolver::state(c, init, theta);
        SectorCircuit sc(c, H, solver.layout());
        Eigen::VectorXcd v = sc.compress(init);
        sc.run(v, theta);
        EXPECT_LT(oracle::infidelity(v, sc.compress(full)), 1e-12);
        EXPECT_NEAR(sc.energy(v), expectation(H, full, solver.layout()), 1e-10);
    }
}

TEST(Ansatz, ParameterCountsFollowTheChainFormulas) {
    for (int nf = 1; nf <= 4; ++nf) {
        Embedding e = embed(HubbardSpec::chain(240, 1.0, 4.0, Boundary::AntiPeriodic, 120), FragmentSpec::line(nf));
        VQESolver solver(analyze_structure(e.K_emb), Geometry::Chain1D, FragmentSpec::line(nf));
        const int n_edge = static_cast<int>(solver.structure().edge_orbitals.size());
        EXPECT_EQ(n_edge, nf == 1 ? 1 : 2);
        EXPECT_EQ(bind(solver.schedule(), Variant::HVMin, solver.structure(), 0.0).slots_per_layer, formula_hv_min_1d(nf, n_edge));
        EXPECT_EQ(bind(solver.schedule(), Variant::HVMax, solver.structure(), 0.0).slots_per_layer, formula_hv_max_1d(nf, n_edge));
    }
    // At half filling vanishing bath terms remove their HV-max slots.
    for (int nf : {1, 3}) {
        Embedding half = embed(HubbardSpec::chain(240, 1.0, 4.0, Boundary::AntiPeriodic, 240), FragmentSpec::line(nf));
        VQESolver hs(analyze_structure(half.K_emb), Geometry::Chain1D, FragmentSpec::line(nf));
        const int n_edge = static_cast<int>(hs.structure().edge_orbitals.size());
        const TermStructure nominal = nominal_structure(Geometry::Chain1D, FragmentSpec::line(nf));
        const int missing = nf - static_cast<int>(hs.structure().bath_number.size()) +
                            static_cast<int>(nominal.hopping().size() - hs.structure().hopping().size());
        EXPECT_GT(missing, 0);
        EXPECT_EQ(bind(hs.schedule(), Variant::HVMax, hs.structure(), 0.0).slots_per_layer, formula_hv_max_1d(nf, n_edge) - missing);
        EXPECT_EQ(bind(hs.schedule(), Variant::HVMin, hs.structure(), 0.0).slots_per_layer, formula_hv_min_1d(nf, n_edge));
    }
    EXPECT_EQ(formula_hv_min_1d(1, 1), 3);
    EXPECT_EQ(formula_hv_max_1d(1, 1), 4);
    EXPECT_EQ(formula_hv_min_1d(2, 2), 5);
    EXPECT_EQ(formula_hv_max_1d(2, 2), 11);
}

TEST(Ansatz, BindingRejectsNetworksThatDisagreeWithTheStructure) {
    TermStructure s = nominal_structure(Geometry::Chain1D, FragmentSpec::line(3));
    NetworkSchedule sched = build_network(Geometry::Chain1D, FragmentSpec::line(3), s);
    EXPECT_NO_THROW(bind(sched, Variant::HVMin, s, 0.0));
    TermStructure missing = s;
    missing.frag_bath.pop_back();
    EXPECT_THROW(bind(sched, Variant::HVMin, missing, 0.0), ConsistencyBreach);
    TermStructure extra = s;
    extra.bath_bath.push_back({3, 4, 0.5});
    EXPECT_THROW(bind(sched, Variant::HVMax, extra, 0.0), ConsistencyBreach);
}

TEST(Ansatz, OddDepthRestoresTheInitialLayout) {
    TermStructure s = nominal_structure(Geometry::Chain1D, FragmentSpec::line(2));
    NetworkSchedule sched = build_network(Geometry::Chain1D, FragmentSpec::line(2), s);
    ParamBinding b = bind(sched, Variant::HVMin, s, 0.0);
    Circuit odd = realize(sched, b, 4.0, 3), even = realize(sched, b, 4.0, 2);
    EXPECT_TRUE(even.restore.empty());
    EXPECT_EQ(even.final_layout, even.initial_layout);
    if (!(odd.final_layout == odd.initial_layout)) {
        EXPECT_FALSE(odd.restore.empty());
    }
    EXPECT_EQ(even.two_qubit_depth, 2 * sched.ansatz_depth());
}

}  // namespace
}  // namespace dmetvqe
