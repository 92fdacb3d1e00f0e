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

#ifndef DMETVQE_ANSATZ_HPP
#define DMETVQE_ANSATZ_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "embedding.hpp"
#include "measure.hpp"
#include "model.hpp"
#include "statevector.hpp"
#include "swap_network.hpp"

namespace dmetvqe {

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

/// Two-qubit layers of one ansatz layer's hopping network.
inline int formula_hopping_depth(Geometry g, const FragmentSpec &f) {
    int n = f.size();
    switch (g) {
        case Geometry::Chain1D: return n + 2;
        case Geometry::Line2D: return 2 * n - 1;
        default: {
            int nx = f.Nx, ny = f.Ny, ne = 2 * (nx + ny - 2);
            int L = n + ne + nx - 3;
            if (nx > 4) L += (ny - 4) * ceil_div(nx - 4, 2);
            return L;
        }
    }
}

/// Ansatz depth per layer (hopping network plus the onsite layer).
inline int formula_ansatz_depth(Geometry g, const FragmentSpec &f) { return formula_hopping_depth(g, f) + 1; }

inline int formula_measurements(Geometry g, const FragmentSpec &f) {
    int n = f.size();
    switch (g) {
        case Geometry::Chain1D: return n + 2;
        case Geometry::Line2D: return 2 * n;
        default: return n + 2 * (f.Nx + f.Ny - 2);
    }
}

inline int pair_count(int n) { return n * (n - 1) / 2; }

inline int formula_hv_min_1d(int n_frag, int n_edge) { return n_frag + n_edge + 1; }

inline int formula_hv_max_1d(int n_frag, int n_edge) {
    return 4 * n_frag + n_edge * n_frag + pair_count((n_frag + 1) / 2) + pair_count(n_frag / 2) - 1;
}

/// Fragment-local nearest-neighbour pairs of an Nx x Ny rectangle.
inline std::vector<std::pair<int, int>> fragment_bonds(const FragmentSpec &f) {
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < f.Nx; ++x)
        for (int y = 0; y < f.Ny; ++y) {
            int i = x * f.Ny + y;
            if (x + 1 < f.Nx) out.push_back({i, i + f.Ny});
            if (y + 1 < f.Ny) out.push_back({i, i + 1});
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<int> geometry_edges(Geometry g, const FragmentSpec &f) {
    HubbardSpec probe;
    probe.dimension = g == Geometry::Chain1D ? 1 : 2;
    return edge_sites(probe, f);
}

/// Bath groups by parity of the eigenvalue rank, as in the 1D structure.
inline std::vector<std::vector<int>> parity_groups(int n_frag) {
    std::vector<std::vector<int>> g(2);
    for (int k = 0; k < n_frag; ++k) g[k % 2].push_back(n_frag + k);
    if (g[1].empty()) g.pop_back();
    return g;
}

/// Term structure implied by the geometry, with unit coefficients.
inline TermStructure nominal_structure(Geometry g, const FragmentSpec &f) {
    TermStructure s;
    const int n = f.size();
    s.n_frag = n;
    for (auto [i, j] : fragment_bonds(f)) s.frag_frag.push_back({i, j, -1.0});
    s.edge_orbitals = geometry_edges(g, f);
    for (int e : s.edge_orbitals)
        for (int b = n; b < 2 * n; ++b) s.frag_bath.push_back({e, b, 1.0});
    std::vector<std::vector<int>> groups;
    if (g == Geometry::Rect2D) {
        int start = n;
        for (int k = 0; k < 4; ++k) {
            int size = n / 4 + (k < n % 4 ? 1 : 0);
            std::vector<int> grp;
            for (int b = 0; b < size; ++b) grp.push_back(start++);
            if (!grp.empty()) groups.push_back(grp);
        }
    } else {
        groups = parity_groups(n);
    }
    s.bath_groups = sort_groups(groups);
    for (const auto &grp : s.bath_groups)
        for (std::size_t a = 0; a < grp.size(); ++a)
            for (std::size_t b = a + 1; b < grp.size(); ++b) s.bath_bath.push_back({grp[a], grp[b], 1.0});
    std::sort(s.bath_bath.begin(), s.bath_bath.end(), [](auto &x, auto &y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
    for (int b = n; b < 2 * n; ++b) s.bath_number.push_back({b, 1.0});
    return s;
}

inline PairSet required_pairs(const TermStructure &s) {
    PairSet p(2 * s.n_frag);
    for (const HoppingTerm &t : s.hopping()) p.add(t.i, t.j);
    return p;
}

/// One ansatz layer's hopping network for one spin sector, with the layout
/// facts needed downstream.
struct NetworkSchedule {
    Geometry geometry = Geometry::Chain1D;
    FragmentSpec fragment;
    SwapNetwork network;
    std::vector<std::vector<int>> bath_blocks;  // bath groups as laid out on the line
    int formula_depth = 0;                      // hopping layers per the closed form
    bool templated = true;                      // false when the generic fallback was used
    bool free_chain_head = false;               // 1D order searched because the fixed one cannot be measured in time
    int measurement_target = 0;                 // hopping-term rounds aimed for on the initial layout
    int measurement_overage = 0;                // rounds beyond that target on the chosen layout
    int search_iterations = 0;

    int hopping_depth() const { return network.depth(); }
    int ansatz_depth() const { return network.depth() + 1; }
    bool deviates() const { return network.uncovered != 0 || hopping_depth() != formula_depth; }
    QubitLayout initial_layout() const { return QubitLayout::from_line(network.initial); }
    QubitLayout final_layout() const { return QubitLayout::from_line(network.final); }
};

namespace detail {

inline bool within_groups(const TermStructure &s, const std::vector<std::vector<int>> &groups) {
    std::map<int, int> label;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int b : groups[g]) label[b] = static_cast<int>(g);
    for (const HoppingTerm &t : s.bath_bath)
        if (label.at(t.i) != label.at(t.j)) return false;
    return true;
}

inline bool edges_within(const TermStructure &s, const std::vector<int> &edges) {
    for (const HoppingTerm &t : s.frag_bath)
        if (std::find(edges.begin(), edges.end(), t.i) == edges.end()) return false;
    return true;
}

inline bool bonds_within(const TermStructure &s, const FragmentSpec &f) {
    auto bonds = fragment_bonds(f);
    for (const HoppingTerm &t : s.frag_frag)
        if (!std::binary_search(bonds.begin(), bonds.end(), std::pair(t.i, t.j))) return false;
    return true;
}

/// Greedy balanced packing of bath groups into at most k blocks.
inline std::vector<std::vector<int>> pack_groups(std::vector<std::vector<int>> groups, int k) {
    groups = sort_groups(groups);
    if (static_cast<int>(groups.size()) <= k) return groups;
    std::vector<std::vector<int>> bins(k);
    for (const auto &g : groups) {
        auto it = std::min_element(bins.begin(), bins.end(), [](auto &a, auto &b) { return a.size() < b.size(); });
        it->insert(it->end(), g.begin(), g.end());
    }
    return sort_groups(bins);
}

inline Block fixed(std::vector<int> modes) { return Block{std::move(modes), false, 1.0}; }
inline Block loose(std::vector<int> modes, double w) { return Block{std::move(modes), true, w}; }

inline std::vector<int> reversed(std::vector<int> v) {
    std::reverse(v.begin(), v.end());
    return v;
}

inline NetworkProblem chain_problem(const TermStructure &s, const std::vector<std::vector<int>> &parity) {
    const int n = s.n_frag;
    NetworkProblem p;
    p.n_modes = 2 * n;
    p.required = required_pairs(s);
    const std::vector<int> &even = parity[0];
    const std::vector<int> odd = parity.size() > 1 ? parity[1] : std::vector<int>{};
    std::vector<int> head;
    if (n == 1) {
        head = {0};
    } else if (n == 2) {
        head = {0, 1};
    } else {
        for (int k = n - 3; k >= 1; --k) head.push_back(k);
        head.insert(head.end(), {0, n - 2, n - 1});
    }
    p.init_blocks = {fixed(head), fixed(odd), fixed(even)};
    std::vector<int> rest;
    for (int k = 1; k + 1 < n; ++k) rest.push_back(k);
    std::vector<int> ends = n == 1 ? std::vector<int>{0} : std::vector<int>{0, n - 1};
    p.target_blocks = {loose(rest, 1.0), fixed(reversed(odd)), fixed(reversed(even)), fixed(ends)};
    return p;
}

inline NetworkProblem line_problem(const TermStructure &s, const std::vector<std::vector<int>> &parity) {
    const int n = s.n_frag;
    NetworkProblem p;
    p.n_modes = 2 * n;
    p.required = required_pairs(s);
    std::vector<int> frag;
    for (int k = 0; k < n; ++k) frag.push_back(k);
    if (n <= 2) {
        std::vector<int> all = frag;
        for (const auto &g : parity) all.insert(all.end(), g.begin(), g.end());
        p.init_blocks = {loose(all, 1.0)};
        p.target_blocks = {loose(all, 1.0)};
        return p;
    }
    std::vector<std::vector<int>> blocks = parity;
    std::sort(blocks.begin(), blocks.end(), [](auto &a, auto &b) { return a.size() < b.size(); });
    p.init_blocks = {loose(frag, 1.0)};
    for (const auto &g : blocks) p.init_blocks.push_back(fixed(g));
    for (const auto &g : blocks) p.target_blocks.push_back(fixed(reversed(g)));
    p.target_blocks.push_back(loose(frag, 1.0));
    return p;
}

inline NetworkProblem rect_problem(const TermStructure &s, const FragmentSpec &f, const std::vector<std::vector<int>> &blocks) {
    const int nx = f.Nx, ny = f.Ny;
    NetworkProblem p;
    p.n_modes = 2 * s.n_frag;
    p.required = required_pairs(s);
    auto site = [&](int r, int c) { return c * ny + r; };  // row r < Ny, column c < Nx
    auto is_edge = [&](int r, int c) { return r == 0 || r == ny - 1 || c == 0 || c == nx - 1; };
    int extra = nx > 4 ? (ny - 4) * ceil_div(nx - 4, 2) : 0;
    std::vector<char> crossing(s.n_frag, 0);
    for (int r = 0; r < ny; ++r)
        for (int c = 0; c < nx; ++c)
            if (is_edge(r, c) || r == 1) crossing[site(r, c)] = 1;
    for (int c = 0; c < nx && extra > 0; ++c)
        if (ny >= 3 && !is_edge(ny - 2, c) && !crossing[site(ny - 2, c)]) {
            crossing[site(ny - 2, c)] = 1;
            --extra;
        }
    std::vector<int> snake;
    for (int r = 0; r < ny; ++r)
        for (int k = 0; k < nx; ++k) snake.push_back(site(r, r % 2 == 0 ? k : nx - 1 - k));
    std::vector<int> init = reversed(snake);
    std::vector<int> stay, cross_target;
    for (int r = 0; r < ny; ++r)
        for (int c = 0; c < nx; ++c)
            if (!crossing[site(r, c)]) stay.push_back(site(r, c));
    for (int m : init)
        if (crossing[m]) cross_target.push_back(m);
    cross_target = reversed(cross_target);
    p.init_blocks = {loose(init, 0.5)};
    for (const auto &g : blocks) p.init_blocks.push_back(fixed(g));
    p.target_blocks = {loose(stay, 0.2)};
    for (const auto &g : blocks) p.target_blocks.push_back(fixed(reversed(g)));
    p.target_blocks.push_back(loose(cross_target, 0.3));
    return p;
}

inline NetworkProblem generic_problem(const TermStructure &s) {
    const int n = s.n_frag;
    NetworkProblem p;
    p.n_modes = 2 * n;
    p.required = required_pairs(s);
    std::vector<int> frag, bath;
    for (int k = 0; k < n; ++k) frag.push_back(k), bath.push_back(n + k);
    p.init_blocks = {loose(frag, 0.25), loose(bath, 0.25)};
    std::vector<int> all = frag;
    all.insert(all.end(), bath.begin(), bath.end());
    p.target_blocks = {loose(reversed(all), 0.5)};
    return p;
}

/// Both orders fully searched, fragment and bath modes interleaved.
inline NetworkProblem open_problem(const TermStructure &s) {
    NetworkProblem p;
    p.n_modes = 2 * s.n_frag;
    p.required = required_pairs(s);
    std::vector<int> all(p.n_modes);
    for (int k = 0; k < p.n_modes; ++k) all[k] = k;
    p.init_blocks = {loose(all, 0.5)};
    p.target_blocks = {loose(reversed(all), 0.5)};
    return p;
}

}  // namespace detail

/// Builds the one-spin hopping network covering every term of `s`. Templates
/// follow the reference layouts; structures they cannot host use a generic
/// searched network whose depth is reported as a deviation.
inline NetworkSchedule build_network(Geometry g, const FragmentSpec &f, const TermStructure &s, const SearchOptions &opt = {}) {
    NetworkSchedule out;
    out.geometry = g;
    out.fragment = f;
    out.formula_depth = g == Geometry::Chain1D && f.size() == 1 ? 1 : formula_hopping_depth(g, f);
    if (s.n_frag != f.size()) throw SpecError("structure and fragment sizes disagree");
    auto edges = geometry_edges(g, f);
    NetworkProblem problem;
    bool fits = detail::bonds_within(s, f) && detail::edges_within(s, edges);
    if (g == Geometry::Rect2D) {
        auto blocks = detail::pack_groups(s.bath_groups, 4);
        fits = fits && detail::within_groups(s, blocks);
        if (fits) {
            problem = detail::rect_problem(s, f, blocks);
            out.bath_blocks = blocks;
        }
    } else {
        auto parity = parity_groups(f.size());
        fits = fits && detail::within_groups(s, parity);
        if (fits) {
            problem = g == Geometry::Chain1D ? detail::chain_problem(s, parity) : detail::line_problem(s, parity);
            out.bath_blocks = parity;
        }
    }
    if (!fits) {
        out.templated = false;
        problem = detail::generic_problem(s);
        out.bath_blocks = {{}};
        for (int b = s.n_frag; b < 2 * s.n_frag; ++b) out.bath_blocks[0].push_back(b);
    }
    problem.target_depth = out.formula_depth;
    out.measurement_target = std::max(1, formula_measurements(g, f) - 1);
    const int goal = out.measurement_target;
    problem.init_cost = [&s, goal](const std::vector<int> &line) {
        auto rounds = hopping_rounds(s, QubitLayout::from_line(line), goal, 6, 0);
        return std::max(0, static_cast<int>(rounds.size()) - goal);
    };
    if (g == Geometry::Chain1D && out.templated) {
        std::vector<int> line = detail::concat(problem.init_blocks);
        auto rounds = hopping_rounds(s, QubitLayout::from_line(line), goal, 32, 200000);
        if (static_cast<int>(rounds.size()) > goal) {
            problem.init_blocks = {detail::loose(line, 1.0)};
            out.free_chain_head = true;
        }
    }
    SearchResult r = search_network(problem, opt);
    if (!r.reached_target && out.templated) {
        NetworkProblem open = detail::open_problem(s);
        open.target_depth = problem.target_depth;
        open.init_cost = problem.init_cost;
        SearchResult alt = search_network(open, opt);
        if (alt.reached_target) {
            r = alt;
            out.free_chain_head = g == Geometry::Chain1D;
            out.templated = false;
        }
    }
    out.network = r.network;
    out.search_iterations = r.iterations;
    out.measurement_overage = plan_embedded(s, out.initial_layout(), goal).overage;
    return out;
}

inline NetworkSchedule build_1d_network(int n_frag, const SearchOptions &opt = {}) {
    FragmentSpec f = FragmentSpec::line(n_frag);
    return build_network(Geometry::Chain1D, f, nominal_structure(Geometry::Chain1D, f), opt);
}

inline NetworkSchedule build_2d_1dfrag_network(int n_frag, const SearchOptions &opt = {}) {
    FragmentSpec f = FragmentSpec::rect(1, n_frag);
    return build_network(Geometry::Line2D, f, nominal_structure(Geometry::Line2D, f), opt);
}

inline NetworkSchedule build_2d_2dfrag_network(int nx, int ny, const SearchOptions &opt = {}) {
    if (nx < 2 || nx > ny) throw SpecError("2D fragments need 2 <= Nx <= Ny");
    FragmentSpec f = FragmentSpec::rect(nx, ny);
    return build_network(Geometry::Rect2D, f, nominal_structure(Geometry::Rect2D, f), opt);
}

/// Minimum edge colouring of a small multigraph-free graph: exact search with
/// Delta colours, then Delta + 1; greedy when the node budget runs out.
inline std::vector<int> edge_colouring(int n_vertices, const std::vector<std::pair<int, int>> &edges, int &n_colours) {
    const int m = static_cast<int>(edges.size());
    std::vector<int> degree(n_vertices, 0);
    for (auto [a, b] : edges) ++degree[a], ++degree[b];
    int delta = m ? *std::max_element(degree.begin(), degree.end()) : 0;
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return degree[edges[x].first] + degree[edges[x].second] > degree[edges[y].first] + degree[edges[y].second];
    });
    std::vector<int> colour(m, -1);
    for (int k = delta; k <= delta + 1 && m > 0; ++k) {
        std::vector<std::vector<char>> used(n_vertices, std::vector<char>(k, 0));
        long budget = 2000000;
        auto rec = [&](auto &&self, int idx) -> bool {
            if (idx == m) return true;
            if (--budget < 0) return false;
            int e = order[idx];
            auto [a, b] = edges[e];
            for (int c = 0; c < k; ++c) {
                if (used[a][c] || used[b][c]) continue;
                used[a][c] = used[b][c] = 1;
                colour[e] = c;
                if (self(self, idx + 1)) return true;
                used[a][c] = used[b][c] = 0;
                if (budget < 0) return false;
            }
            colour[e] = -1;
            return false;
        };
        if (rec(rec, 0)) {
            n_colours = k;
            return colour;
        }
    }
    std::vector<std::vector<char>> used(n_vertices);
    n_colours = 0;
    for (int e : order) {
        auto [a, b] = edges[e];
        int c = 0;
        while (c < n_colours && (used[a][c] || used[b][c])) ++c;
        if (c == n_colours) {
            ++n_colours;
            for (auto &u : used) u.push_back(0);
        }
        used[a][c] = used[b][c] = 1;
        colour[e] = c;
    }
    return colour;
}

enum class Variant { HVMin, HVMax };

inline const char *to_string(Variant v) { return v == Variant::HVMin ? "hv-min" : "hv-max"; }

inline Variant parse_variant(const std::string &s) {
    if (s == "hv-min" || s == "min") return Variant::HVMin;
    if (s == "hv-max" || s == "max") return Variant::HVMax;
    throw SpecError("unknown ansatz variant '" + s + "'");
}

struct SlotRef {
    int slot = -1;
    double scale = 0.0;
};

/// Parameter slots of one ansatz layer. Up and down copies of a term share a slot.
struct ParamBinding {
    Variant variant = Variant::HVMin;
    int slots_per_layer = 0;
    std::map<std::pair<int, int>, SlotRef> hopping;  // (i < j) -> slot
    std::vector<SlotRef> onsite;                     // per fragment orbital
    std::vector<SlotRef> number;                     // per orbital; slot < 0 when absent
    std::vector<std::string> labels;
};

/// Coefficient-weighted groups for HV-min, unit-weighted slots for HV-max.
/// Fragment number terms carry -mu + K_ii and are always present; the
/// network must realize exactly the hopping terms of the structure.
inline ParamBinding bind(const NetworkSchedule &sched, Variant variant, const TermStructure &s, double mu) {
    const int n = s.n_frag;
    std::map<std::pair<int, int>, double> terms;
    for (const HoppingTerm &t : s.hopping()) terms[{t.i, t.j}] = t.t;
    std::map<std::pair<int, int>, int> seen;
    for (const auto &layer : sched.network.layers)
        for (const auto &g : layer.gates)
            if (g.hop) {
                auto key = std::minmax(g.left, g.right);
                if (!terms.count(key))
                    throw ConsistencyBreach("network realizes a hopping term absent from the structure");
                ++seen[key];
            }
    for (const auto &[key, c] : terms)
        if (seen[key] != 1) throw ConsistencyBreach("a structure hopping term is not realized exactly once");

    std::vector<double> number_coeff(2 * n, 0.0);
    std::vector<char> has_number(2 * n, 0);
    for (int i = 0; i < n; ++i) has_number[i] = 1, number_coeff[i] = -mu;
    for (const NumberTerm &t : s.frag_number) number_coeff[t.i] += t.t;
    for (const NumberTerm &t : s.bath_number) has_number[t.i] = 1, number_coeff[t.i] = t.t;

    ParamBinding b;
    b.variant = variant;
    b.onsite.resize(n);
    b.number.resize(2 * n);
    int slot = 0;
    if (variant == Variant::HVMin) {
        for (int i = 0; i < n; ++i) b.onsite[i] = {slot, 1.0};
        b.labels.push_back("onsite");
        ++slot;
        std::vector<std::pair<int, int>> edges;
        for (const auto &[key, c] : terms) edges.push_back(key);
        int colours = 0;
        auto colour = edge_colouring(2 * n, edges, colours);
        for (std::size_t e = 0; e < edges.size(); ++e) b.hopping[edges[e]] = {slot + colour[e], terms[edges[e]]};
        for (int c = 0; c < colours; ++c) b.labels.push_back("hopping-group-" + std::to_string(c));
        slot += colours;
        for (int i = 0; i < 2 * n; ++i)
            if (has_number[i]) b.number[i] = {slot, number_coeff[i]};
        b.labels.push_back("number");
        ++slot;
    } else {
        for (int i = 0; i < n; ++i) {
            b.onsite[i] = {slot++, 1.0};
            b.labels.push_back("onsite-" + std::to_string(i));
        }
        for (const auto &[key, c] : terms) {
            b.hopping[key] = {slot++, 1.0};
            b.labels.push_back("hop-" + std::to_string(key.first) + "-" + std::to_string(key.second));
        }
        for (int i = 0; i < 2 * n; ++i)
            if (has_number[i]) {
                b.number[i] = {slot++, 1.0};
                b.labels.push_back("number-" + std::to_string(i));
            }
    }
    b.slots_per_layer = slot;
    // HV-min onsite scale is U, filled in by realize from the Hamiltonian.
    return b;
}

struct CircuitLayer {
    std::vector<Gate> gates;  // disjoint two-qubit gates
    std::vector<Gate> post;   // single-qubit gates applied after `gates`
};

/// Parameterized ansatz circuit (without the state preparation).
struct Circuit {
    int n_qubits = 0;
    int n_slots = 0;
    std::vector<CircuitLayer> layers;
    QubitLayout initial_layout, final_layout;
    int two_qubit_depth = 0;
    std::vector<int> layer_depths;  // two-qubit depth of each ansatz layer
    std::vector<CircuitLayer> restore;  // FSWAP layers returning to initial_layout before measurement
};

namespace detail {

inline Gate make_gate(GateKind k, int q0, int q1, SlotRef ref, int layer_offset, double offset = 0.0) {
    Gate g;
    g.kind = k;
    g.q0 = q0;
    g.q1 = q1;
    g.offset = offset;
    if (ref.slot >= 0) {
        g.slot = ref.slot + layer_offset;
        g.scale = ref.scale;
    }
    return g;
}

}  // namespace detail

/// d ansatz layers; each is onsite -> hopping network -> number gates, with the
/// network reversed on every second layer. Both spin sectors follow the
/// one-spin template.
inline Circuit realize(const NetworkSchedule &sched, const ParamBinding &b, double U, int depth) {
    const SwapNetwork &net = sched.network;
    const int n = static_cast<int>(net.initial.size());
    Circuit c;
    c.n_qubits = 2 * n;
    c.n_slots = b.slots_per_layer * depth;
    c.initial_layout = QubitLayout::from_line(net.initial);
    std::vector<int> line = net.initial;
    for (int d = 0; d < depth; ++d) {
        const int off = d * b.slots_per_layer;
        const bool forward = d % 2 == 0;
        int layer_depth = 0;
        CircuitLayer onsite;
        std::vector<int> pos(n);
        for (int p = 0; p < n; ++p) pos[line[p]] = p;
        for (int i = 0; i < static_cast<int>(b.onsite.size()); ++i) {
            SlotRef ref = b.onsite[i];
            if (b.variant == Variant::HVMin) ref.scale = U;
            onsite.gates.push_back(detail::make_gate(GateKind::OnsitePhase, pos[i], n + pos[i], ref, off));
        }
        if (!onsite.gates.empty()) {
            c.layers.push_back(onsite);
            ++layer_depth;
        }
        const std::size_t first = c.layers.size();
        std::vector<int> last_touch(n, -1);  // layer index of the mode's last gate
        for (int k = 0; k < net.depth(); ++k) {
            const NetworkLayer &nl = net.layers[forward ? k : net.depth() - 1 - k];
            CircuitLayer layer;
            for (const NetworkGate &g : nl.gates) {
                int p = g.pos, a = line[p], bm = line[p + 1];
                auto key = std::minmax(a, bm);
                for (int spin = 0; spin < 2; ++spin) {
                    int q0 = spin * n + p, q1 = q0 + 1;
                    if (g.hop) {
                        SlotRef ref = b.hopping.at(key);
                        double fold = g.swap ? std::numbers::pi / 2 : 0.0;
                        layer.gates.push_back(detail::make_gate(GateKind::Hopping, q0, q1, ref, off, fold));
                        if (g.swap) layer.post.push_back(detail::make_gate(GateKind::SCorrection, q0, q1, {}, off));
                    } else {
                        layer.gates.push_back(detail::make_gate(GateKind::FSWAP, q0, q1, {}, off));
                    }
                }
                if (g.swap) std::swap(line[p], line[p + 1]);
                last_touch[a] = last_touch[bm] = static_cast<int>(c.layers.size());
            }
            c.layers.push_back(std::move(layer));
            ++layer_depth;
        }
        for (int p = 0; p < n; ++p) pos[line[p]] = p;
        CircuitLayer tail;
        for (int i = 0; i < n; ++i) {
            SlotRef ref = b.number[i];
            if (ref.slot < 0) continue;
            int at = last_touch[i] < 0 ? static_cast<int>(first) : last_touch[i] + 1;
            for (int spin = 0; spin < 2; ++spin) {
                Gate g = detail::make_gate(GateKind::NumberPhase, spin * n + pos[i], -1, ref, off);
                if (at < static_cast<int>(c.layers.size())) c.layers[at].post.push_back(g);
                else tail.post.push_back(g);
            }
        }
        if (!tail.post.empty()) c.layers.push_back(std::move(tail));
        c.layer_depths.push_back(layer_depth);
        c.two_qubit_depth += layer_depth;
    }
    c.final_layout = QubitLayout::from_line(line);
    if (line != net.initial) {
        std::vector<int> rank(n);
        for (int p = 0; p < n; ++p) rank[net.initial[p]] = p;
        SwapNetwork back = sort_network(line, rank, PairSet(n), 0, true);
        SwapNetwork alt = sort_network(line, rank, PairSet(n), 1, true);
        if (alt.depth() < back.depth()) back = alt;
        for (const NetworkLayer &nl : back.layers) {
            CircuitLayer layer;
            for (const NetworkGate &g : nl.gates)
                for (int spin = 0; spin < 2; ++spin)
                    layer.gates.push_back(detail::make_gate(GateKind::FSWAP, spin * n + g.pos, spin * n + g.pos + 1, {}, 0));
            c.restore.push_back(std::move(layer));
        }
    }
    return c;
}

inline void run_circuit(const Circuit &c, const std::vector<double> &theta, StateVector &s) {
    if (static_cast<int>(theta.size()) != c.n_slots) throw SpecError("parameter vector length mismatch");
    for (const CircuitLayer &layer : c.layers) {
        for (const Gate &g : layer.gates) apply(s, g, theta);
        for (const Gate &g : layer.post) apply(s, g, theta);
    }
    for (const CircuitLayer &layer : c.restore)
        for (const Gate &g : layer.gates) apply(s, g, theta);
}

}  // namespace dmetvqe

#endif  // DMETVQE_ANSATZ_HPP
