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

#ifndef DMETVQE_REPORT_HPP
#define DMETVQE_REPORT_HPP

#include <string>
#include <vector>

#include "ansatz.hpp"
#include "json.hpp"
#include "measure.hpp"

namespace dmetvqe {

/// Generated network and measurement plan of a nominal geometry, compared
/// with the closed-form counts.
struct ScheduleCheck {
    Geometry geometry = Geometry::Chain1D;
    FragmentSpec fragment;
    TermStructure structure;
    NetworkSchedule schedule;
    MeasurementPlan plan;
    int depth = 0, formula_depth = 0;
    int measurements = 0, formula_measurements = 0;

    bool depth_ok() const { return depth == formula_depth; }
    bool measurements_ok() const { return measurements == formula_measurements; }
    bool ok() const { return depth_ok() && measurements_ok(); }
};

inline ScheduleCheck check_schedule(Geometry g, const FragmentSpec &f, const SearchOptions &opt = {}) {
    ScheduleCheck c;
    c.geometry = g;
    c.fragment = f;
    c.structure = nominal_structure(g, f);
    c.schedule = build_network(g, f, c.structure, opt);
    c.plan = plan_embedded(c.structure, c.schedule.initial_layout(), c.schedule.measurement_target);
    c.depth = c.schedule.ansatz_depth();
    c.formula_depth = formula_ansatz_depth(g, f);
    c.measurements = c.plan.preparations();
    c.formula_measurements = formula_measurements(g, f);
    return c;
}

/// The geometries of the schedule-count table.
inline std::vector<std::pair<Geometry, FragmentSpec>> table1_geometries() {
    std::vector<std::pair<Geometry, FragmentSpec>> out;
    for (int n = 1; n <= 8; ++n) out.push_back({Geometry::Chain1D, FragmentSpec::line(n)});
    for (int n = 1; n <= 6; ++n) out.push_back({Geometry::Line2D, FragmentSpec::rect(1, n)});
    for (auto [nx, ny] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}, {5, 5}, {6, 6}})
        out.push_back({Geometry::Rect2D, FragmentSpec::rect(nx, ny)});
    return out;
}

inline std::string fragment_label(const FragmentSpec &f) { return std::to_string(f.Nx) + "x" + std::to_string(f.Ny); }

inline nlohmann::json gate_json(const Gate &g) {
    nlohmann::json j = {{"kind", to_string(g.kind)}, {"q0", g.q0}};
    if (g.q1 >= 0) j["q1"] = g.q1;
    if (g.slot >= 0) {
        j["slot"] = g.slot;
        j["scale"] = g.scale;
    }
    if (g.offset != 0.0) j["offset"] = g.offset;
    return j;
}

inline nlohmann::json layers_json(const std::vector<CircuitLayer> &layers) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &l : layers) {
        nlohmann::json gates = nlohmann::json::array(), post = nlohmann::json::array();
        for (const auto &g : l.gates) gates.push_back(gate_json(g));
        for (const auto &g : l.post) post.push_back(gate_json(g));
        out.push_back({{"gates", gates}, {"post", post}});
    }
    return out;
}

/// JSON form of a schedule check: one-layer HV-min circuit, the measurement
/// plan and the count comparison.
inline nlohmann::json schedule_json(const ScheduleCheck &c) {
    const ParamBinding b = bind(c.schedule, Variant::HVMin, c.structure, 0.0);
    const Circuit circ = realize(c.schedule, b, 1.0, 1);
    nlohmann::json net_layers = nlohmann::json::array();
    for (const auto &l : c.schedule.network.layers) {
        nlohmann::json gates = nlohmann::json::array();
        for (const auto &g : l.gates)
            gates.push_back({{"pos", g.pos}, {"modes", {g.left, g.right}}, {"swap", g.swap}, {"hop", g.hop}});
        net_layers.push_back(gates);
    }
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto &r : c.plan.rounds) {
        nlohmann::json pairs = nlohmann::json::array(), terms = nlohmann::json::array();
        for (auto [p, q] : r.pairs) pairs.push_back({p, q});
        for (auto [i, j] : r.terms) terms.push_back({i, j});
        rounds.push_back({{"diagonal", r.diagonal}, {"pairs", pairs}, {"terms", terms}});
    }
    return {
        {"geometry", to_string(c.geometry)},
        {"fragment", fragment_label(c.fragment)},
        {"counts",
         {{"ansatz_depth", c.depth},
          {"formula_ansatz_depth", c.formula_depth},
          {"depth_pass", c.depth_ok()},
          {"measurements", c.measurements},
          {"formula_measurements", c.formula_measurements},
          {"measurements_pass", c.measurements_ok()}}},
        {"network",
         {{"initial", c.schedule.network.initial},
          {"final", c.schedule.network.final},
          {"templated", c.schedule.templated},
          {"layers", net_layers}}},
        {"circuit",
         {{"qubits", circ.n_qubits},
          {"slots", circ.n_slots},
          {"slot_labels", b.labels},
          {"two_qubit_depth", circ.two_qubit_depth},
          {"layers", layers_json(circ.layers)},
          {"restore", layers_json(circ.restore)}}},
        {"measurement", {{"preparations", c.plan.preparations()}, {"layout", c.plan.layout.position}, {"rounds", rounds}}},
    };
}

}  // namespace dmetvqe

#endif  // DMETVQE_REPORT_HPP
