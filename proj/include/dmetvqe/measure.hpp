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

#ifndef DMETVQE_MEASURE_HPP
#define DMETVQE_MEASURE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "embedding.hpp"
#include "statevector.hpp"

namespace dmetvqe {

struct MeasurementRound {
    std::vector<std::pair<int, int>> pairs;  // line positions (p < q) receiving M
    std::vector<std::pair<int, int>> terms;  // orbital pairs (i < j) read in this round
    bool diagonal = false;                   // computational-basis round for number/onsite terms
};

struct MeasurementPlan {
    std::vector<MeasurementRound> rounds;
    QubitLayout layout;
    int overage = 0;  // rounds appended because packing failed

    int preparations() const { return static_cast<int>(rounds.size()); }
};

inline bool crosses(std::pair<int, int> a, std::pair<int, int> b) {
    if (a.first > b.first) std::swap(a, b);
    return a.first < b.first && b.first < a.second && a.second < b.second;
}

inline bool compatible(const MeasurementRound &r, std::pair<int, int> p) {
    for (auto q : r.pairs) {
        if (q.first == p.first || q.first == p.second || q.second == p.first || q.second == p.second) return false;
        if (crosses(q, p)) return false;
    }
    return true;
}

/// All pairs among n line positions in n rounds of at most two rainbows.
inline MeasurementPlan plan_rainbow(int n) {
    if (n < 2) throw SpecError("rainbow plan needs n >= 2");
    MeasurementPlan plan;
    plan.layout = QubitLayout::identity(n);
    for (int k = 1; k <= n; ++k) {
        MeasurementRound r;
        for (int a = 1, b = k - 1; a < b; ++a, --b) r.pairs.push_back({a - 1, b - 1});
        for (int a = k, b = n; a < b; ++a, --b) r.pairs.push_back({a - 1, b - 1});
        std::sort(r.pairs.begin(), r.pairs.end());
        r.terms = r.pairs;
        plan.rounds.push_back(std::move(r));
    }
    return plan;
}

/// Pairs between the first n_a and the next n_b positions in n_a + n_b - 1 rounds.
inline MeasurementPlan plan_two_sets(int n_a, int n_b) {
    if (n_a < 1 || n_b < n_a) throw SpecError("two-set plan needs 1 <= N_A <= N_B");
    MeasurementPlan plan;
    plan.layout = QubitLayout::identity(n_a + n_b);
    for (int s = 0; s <= n_a + n_b - 2; ++s) {
        MeasurementRound r;
        for (int i = 0; i < n_a; ++i) {
            int j = s - i;
            if (j >= 0 && j < n_b) r.pairs.push_back({i, n_a + j});
        }
        r.terms = r.pairs;
        plan.rounds.push_back(std::move(r));
    }
    return plan;
}

namespace detail {

/// Sweep rounds between position-sorted sets A and B lying on opposite sides.
inline std::vector<std::vector<std::pair<int, int>>> two_set_sweep(std::vector<int> A, std::vector<int> B) {
    std::sort(A.begin(), A.end());
    std::sort(B.begin(), B.end());
    std::vector<std::vector<std::pair<int, int>>> rounds;
    const int na = static_cast<int>(A.size()), nb = static_cast<int>(B.size());
    for (int s = 0; s <= na + nb - 2; ++s) {
        std::vector<std::pair<int, int>> r;
        for (int i = 0; i < na; ++i) {
            int j = s - i;
            if (j >= 0 && j < nb) r.push_back(std::minmax(A[i], B[j]));
        }
        rounds.push_back(std::move(r));
    }
    return rounds;
}

inline bool separated(const std::vector<int> &A, const std::vector<int> &B) {
    if (A.empty() || B.empty()) return false;
    auto [amin, amax] = std::minmax_element(A.begin(), A.end());
    auto [bmin, bmax] = std::minmax_element(B.begin(), B.end());
    return *amax < *bmin || *bmax < *amin;
}

}  // namespace detail

namespace detail {

inline bool pair_conflict(std::pair<int, int> a, std::pair<int, int> b) {
    if (a.first == b.first || a.first == b.second || a.second == b.first || a.second == b.second) return true;
    return crosses(a, b);
}

/// Exact colouring of the pair-conflict graph with k rounds (DSatur order,
/// backtracking). Returns an empty vector when infeasible or out of budget.
inline std::vector<int> colour_pairs(const std::vector<std::pair<int, int>> &P, int k, long budget) {
    const int m = static_cast<int>(P.size());
    std::vector<std::vector<int>> adj(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (pair_conflict(P[i], P[j])) adj[i].push_back(j), adj[j].push_back(i);
    std::vector<int> col(m, -1), sat(m, 0);
    std::vector<std::vector<int>> cnt(m, std::vector<int>(k, 0));
    auto rec = [&](auto &&self, int placed) -> bool {
        if (placed == m) return true;
        if (--budget < 0) return false;
        int v = -1;
        for (int u = 0; u < m; ++u)
            if (col[u] < 0 && (v < 0 || sat[u] > sat[v] || (sat[u] == sat[v] && adj[u].size() > adj[v].size()))) v = u;
        for (int c = 0; c < k; ++c) {
            if (cnt[v][c]) continue;
            col[v] = c;
            for (int u : adj[v])
                if (cnt[u][c]++ == 0) ++sat[u];
            if (self(self, placed + 1)) return true;
            for (int u : adj[v])
                if (--cnt[u][c] == 0) --sat[u];
            col[v] = -1;
            if (budget < 0) return false;
        }
        return false;
    };
    if (!rec(rec, 0)) return {};
    return col;
}

}  // namespace detail

/// Hopping-term rounds on a layout: the edge x bath sweep first, then
/// fragment-only and bath-only terms packed greedily over several orders.
/// When that misses `target` rounds, an exact colouring is tried within
/// `budget` search nodes.
inline std::vector<MeasurementRound> hopping_rounds(const TermStructure &s, const QubitLayout &layout, int target, int orders,
                                                    long budget) {
    const int n = s.n_frag;
    std::map<std::pair<int, int>, char> pending;
    for (const HoppingTerm &t : s.hopping()) pending[{t.i, t.j}] = 1;
    auto pos_pair = [&](std::pair<int, int> t) { return std::minmax(layout.position[t.first], layout.position[t.second]); };
    std::vector<MeasurementRound> core;
    std::vector<int> A, B;
    for (int e : s.edge_orbitals) A.push_back(layout.position[e]);
    for (int b = n; b < 2 * n; ++b) B.push_back(layout.position[b]);
    std::vector<int> line = layout.line();
    if (detail::separated(A, B)) {
        for (const auto &sweep : detail::two_set_sweep(A, B)) {
            MeasurementRound r;
            for (auto [p, q] : sweep) {
                auto key = std::minmax(line[p], line[q]);
                if (!pending.count(key)) continue;
                r.pairs.push_back({p, q});
                r.terms.push_back(key);
                pending.erase(key);
            }
            core.push_back(std::move(r));
        }
    }
    std::vector<std::pair<int, int>> rest;
    for (const auto &[key, v] : pending) rest.push_back(key);
    std::vector<std::vector<std::pair<int, int>>> order_list;
    auto by_span = rest;
    std::stable_sort(by_span.begin(), by_span.end(), [&](auto a, auto b) {
        auto pa = pos_pair(a), pb = pos_pair(b);
        return pa.second - pa.first > pb.second - pb.first;
    });
    order_list.push_back(by_span);
    order_list.push_back(rest);
    std::mt19937_64 rng(0xbeef);
    while (static_cast<int>(order_list.size()) < orders) {
        auto o = rest;
        std::shuffle(o.begin(), o.end(), rng);
        order_list.push_back(std::move(o));
    }
    std::vector<MeasurementRound> best;
    bool have = false;
    for (const auto &order : order_list) {
        std::vector<MeasurementRound> rounds = core;
        for (auto key : order) {
            auto pq = pos_pair(key);
            bool placed = false;
            for (auto &r : rounds)
                if (compatible(r, pq)) {
                    r.pairs.push_back(pq);
                    r.terms.push_back(key);
                    placed = true;
                    break;
                }
            if (!placed) {
                MeasurementRound r;
                r.pairs.push_back(pq);
                r.terms.push_back(key);
                rounds.push_back(std::move(r));
            }
        }
        if (!have || rounds.size() < best.size()) {
            best = std::move(rounds);
            have = true;
        }
        if (static_cast<int>(best.size()) <= target) break;
    }
    if (static_cast<int>(best.size()) > target && budget > 0) {
        std::vector<std::pair<int, int>> keys, P;
        for (const HoppingTerm &t : s.hopping()) {
            keys.push_back({t.i, t.j});
            P.push_back(pos_pair({t.i, t.j}));
        }
        auto col = detail::colour_pairs(P, target, budget);
        if (!col.empty() || P.empty()) {
            best.assign(target, MeasurementRound{});
            for (std::size_t e = 0; e < P.size(); ++e) {
                best[col[e]].pairs.push_back(P[e]);
                best[col[e]].terms.push_back(keys[e]);
            }
        }
    }
    for (auto &r : best) std::sort(r.pairs.begin(), r.pairs.end());
    return best;
}

/// Full plan on a layout: hopping rounds plus one computational-basis round.
/// `target` is the hopping-round count aimed for; rounds beyond it are
/// reported as overage.
inline MeasurementPlan plan_embedded(const TermStructure &s, const QubitLayout &layout, int target = -1) {
    MeasurementPlan plan;
    plan.layout = layout;
    int goal = target;
    if (goal < 0) {
        std::vector<int> A = s.edge_orbitals;
        goal = A.empty() ? 0 : static_cast<int>(A.size()) + s.n_frag - 1;
    }
    plan.rounds = hopping_rounds(s, layout, goal, 32, 2000000);
    plan.overage = std::max(0, plan.preparations() - goal);
    MeasurementRound diag;
    diag.diagonal = true;
    plan.rounds.push_back(std::move(diag));
    return plan;
}

/// Estimate of one expectation value, per spin where relevant.
struct TermEstimate {
    enum Kind { Hopping, Number, Onsite } kind = Hopping;
    int i = 0, j = 0, spin = 0;
    double value = 0.0;
    double variance = 0.0;  // single-shot variance estimate
    std::uint64_t samples = 0;
};

struct EstimatorOptions {
    std::uint64_t shots = 10000;
    bool exact = false;            // use outcome probabilities instead of samples
    bool error_detection = false;  // drop shots with wrong per-spin Hamming weight
    std::uint64_t seed = 1;
};

struct EstimatorResult {
    double energy = 0.0;
    std::vector<TermEstimate> terms;
    Eigen::MatrixXd one_rdm;     // spin-summed, same convention as measure_terms
    Eigen::VectorXd double_occ;  // per fragment orbital
    double kept_fraction = 1.0;
    std::uint64_t total_shots = 0;
};

/// Reads every term of H from the plan's rounds on `state`, which must be
/// expressed in the plan's layout.
inline EstimatorResult estimate_energy(const EmbeddedHamiltonian &H, const MeasurementPlan &plan, const StateVector &state,
                                       const EstimatorOptions &opt) {
    if (plan.rounds.empty()) throw SpecError("empty measurement plan");
    const int n = H.orbitals();
    const QubitLayout &layout = plan.layout;
    EstimatorResult out;
    out.one_rdm = Eigen::MatrixXd::Zero(n, n);
    out.double_occ = Eigen::VectorXd::Zero(H.n_frag);
    const std::uint64_t spin_mask = (std::uint64_t{1} << n) - 1;
    double kept_total = 0.0, drawn_total = 0.0;
    for (std::size_t r = 0; r < plan.rounds.size(); ++r) {
        const MeasurementRound &round = plan.rounds[r];
        StateVector s = state;
        for (auto [p, q] : round.pairs)
            for (int spin = 0; spin < 2; ++spin) apply_mbasis(s, spin * n + p, spin * n + q);
        std::vector<double> weight = probabilities(s);
        if (!opt.exact) {
            auto rng = make_rng(opt.seed, r);
            auto counts = sample_counts(weight, opt.shots, rng);
            for (std::size_t k = 0; k < weight.size(); ++k) weight[k] = static_cast<double>(counts[k]);
            out.total_shots += opt.shots;
        }
        double drawn = 0.0;
        for (double w : weight) drawn += w;
        if (opt.error_detection) {
            for (std::uint64_t k = 0; k < weight.size(); ++k)
                if (std::popcount(k & spin_mask) != H.n_up() || std::popcount(k >> n) != H.n_down()) weight[k] = 0.0;
        }
        std::vector<std::pair<std::uint64_t, double>> hits;
        double kept = 0.0;
        for (std::uint64_t k = 0; k < weight.size(); ++k)
            if (weight[k] != 0.0) {
                hits.push_back({k, weight[k]});
                kept += weight[k];
            }
        kept_total += kept;
        drawn_total += drawn;
        if (kept <= 0.0) continue;

        auto finish = [&](TermEstimate t, double sum, double sum_sq) {
            t.value = sum / kept;
            t.variance = std::max(0.0, sum_sq / kept - t.value * t.value);
            t.samples = opt.exact ? 0 : static_cast<std::uint64_t>(kept);
            out.terms.push_back(t);
            return t.value;
        };
        if (round.diagonal) {
            for (int i = 0; i < n; ++i)
                for (int spin = 0; spin < 2; ++spin) {
                    std::uint64_t m = std::uint64_t{1} << layout.qubit(i, spin);
                    double acc = 0.0;
                    for (auto [k, w] : hits)
                        if (k & m) acc += w;
                    out.one_rdm(i, i) += finish({TermEstimate::Number, i, i, spin}, acc, acc);
                }
            for (int i = 0; i < H.n_frag; ++i) {
                std::uint64_t m = (std::uint64_t{1} << layout.qubit(i, 0)) | (std::uint64_t{1} << layout.qubit(i, 1));
                double acc = 0.0;
                for (auto [k, w] : hits)
                    if ((k & m) == m) acc += w;
                out.double_occ(i) = finish({TermEstimate::Onsite, i, i, 0}, acc, acc);
            }
            continue;
        }
        for (auto [i, j] : round.terms)
            for (int spin = 0; spin < 2; ++spin) {
                int p = layout.qubit(i, spin), q = layout.qubit(j, spin);
                if (p > q) std::swap(p, q);
                const std::uint64_t bp = std::uint64_t{1} << p, bq = std::uint64_t{1} << q;
                const std::uint64_t between = (bq - 1) & ~((bp << 1) - 1);
                double acc = 0.0, acc_sq = 0.0;
                for (auto [k, w] : hits) {
                    bool xp = k & bp, xq = k & bq;
                    if (xp == xq) continue;
                    double v = xq ? 1.0 : -1.0;  // (b_p, b_q) = (0, 1) -> +1
                    if (std::popcount(k & between) & 1) v = -v;
                    acc += v * w;
                    acc_sq += w;
                }
                double val = finish({TermEstimate::Hopping, i, j, spin}, acc, acc_sq);
                out.one_rdm(i, j) += 0.5 * val;
                out.one_rdm(j, i) = out.one_rdm(i, j);
            }
    }
    out.kept_fraction = drawn_total > 0 ? kept_total / drawn_total : 1.0;
    Eigen::MatrixXd Q = H.quadratic();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        e += Q(i, i) * out.one_rdm(i, i);
        for (int j = i + 1; j < n; ++j) e += 2.0 * Q(i, j) * out.one_rdm(i, j);
    }
    out.energy = e + H.U * out.double_occ.sum();
    return out;
}

}  // namespace dmetvqe

#endif  // DMETVQE_MEASURE_HPP
