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

#ifndef DMETVQE_SWAP_NETWORK_HPP
#define DMETVQE_SWAP_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "errors.hpp"

namespace dmetvqe {

/// Symmetric boolean relation on modes 0..n-1.
class PairSet {
  public:
    PairSet() = default;
    explicit PairSet(int n) : n_(n), bits_(static_cast<std::size_t>(n) * n, 0) {}

    int size() const { return n_; }
    void add(int a, int b) {
        if (a == b) throw SpecError("a pair needs two distinct modes");
        if (!at(a, b)) ++count_;
        bits_[idx(a, b)] = bits_[idx(b, a)] = 1;
    }
    bool contains(int a, int b) const { return at(a, b); }
    int count() const { return count_; }

  private:
    std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * n_ + b; }
    bool at(int a, int b) const { return bits_[idx(a, b)] != 0; }
    int n_ = 0;
    int count_ = 0;
    std::vector<char> bits_;
};

/// Two-qubit gate of a one-spin swap network, acting on line positions
/// (pos, pos+1). `left`/`right` are the modes there before the gate.
struct NetworkGate {
    int pos = 0;
    int left = 0, right = 0;
    bool swap = false;
    bool hop = false;
};

struct NetworkLayer {
    std::vector<NetworkGate> gates;
};

struct SwapNetwork {
    std::vector<int> initial;  // line order, position -> mode
    std::vector<int> final;
    std::vector<NetworkLayer> layers;
    int uncovered = 0;

    int depth() const { return static_cast<int>(layers.size()); }
};

/// Odd-even transposition sort from `init` towards increasing `rank`. An
/// inverted adjacent pair is swapped (with a folded hopping gate when the pair
/// is required); a required pair met in sorted orientation gets a plain
/// hopping gate the first time. Rounds with no gate are skipped.
inline SwapNetwork sort_network(const std::vector<int> &init, const std::vector<int> &rank, const PairSet &required,
                                int start_parity, bool record = true, int max_rounds = -1) {
    const int n = static_cast<int>(init.size());
    if (max_rounds < 0) max_rounds = 4 * n + 8;
    SwapNetwork out;
    out.initial = init;
    std::vector<int> line = init;
    std::vector<char> done(static_cast<std::size_t>(n) * n, 0);
    int covered = 0, idle = 0;
    for (int t = 0; t < max_rounds; ++t) {
        int p = (t + start_parity) % 2;
        NetworkLayer layer;
        bool active = false;
        for (int i = p; i + 1 < n; i += 2) {
            int x = line[i], y = line[i + 1];
            bool need = required.contains(x, y) && !done[static_cast<std::size_t>(x) * n + y];
            NetworkGate g{i, x, y, false, false};
            if (rank[x] > rank[y]) {
                g.swap = true;
                g.hop = need;
                std::swap(line[i], line[i + 1]);
            } else if (need) {
                g.hop = true;
            } else {
                continue;
            }
            if (g.hop) {
                done[static_cast<std::size_t>(x) * n + y] = done[static_cast<std::size_t>(y) * n + x] = 1;
                ++covered;
            }
            active = true;
            if (record) layer.gates.push_back(g);
        }
        if (active) {
            idle = 0;
            if (record) out.layers.push_back(std::move(layer));
            else out.layers.emplace_back();
        } else if (++idle >= 2) {
            break;
        }
    }
    out.final = line;
    out.uncovered = required.count() - covered;
    return out;
}

/// A contiguous stretch of the line whose internal order is fixed or searched.
struct Block {
    std::vector<int> modes;
    bool free = false;
    double weight = 1.0;
};

/// Initial line = concatenation of init_blocks; sort target = concatenation
/// of target_blocks. Free blocks are permuted by the search.
struct NetworkProblem {
    int n_modes = 0;
    PairSet required;
    std::vector<Block> init_blocks;
    std::vector<Block> target_blocks;
    int target_depth = 0;
    /// Extra cost of an initial line, charged once every pair is covered.
    /// A layout is accepted only when this returns zero.
    std::function<int(const std::vector<int> &)> init_cost;
};

struct SearchOptions {
    std::uint64_t seed = 0x5d1a7e;
    int max_iters = 60000;
    int restarts = 4;
};

struct SearchResult {
    SwapNetwork network;
    int start_parity = 0;
    int iterations = 0;
    bool reached_target = false;
    int init_cost = 0;
};

namespace detail {

inline std::vector<int> concat(const std::vector<Block> &blocks) {
    std::vector<int> out;
    for (const Block &b : blocks) out.insert(out.end(), b.modes.begin(), b.modes.end());
    return out;
}

struct Score {
    long value;
    int depth, uncovered, parity, extra;
};

struct CostCache {
    std::map<std::vector<int>, int> seen;
    int operator()(const NetworkProblem &p, const std::vector<int> &init) {
        if (!p.init_cost) return 0;
        auto it = seen.find(init);
        if (it != seen.end()) return it->second;
        return seen[init] = p.init_cost(init);
    }
};

inline Score score_problem(const NetworkProblem &p, CostCache &cache) {
    std::vector<int> init = concat(p.init_blocks), target = concat(p.target_blocks);
    std::vector<int> rank(p.n_modes);
    for (int i = 0; i < static_cast<int>(target.size()); ++i) rank[target[i]] = i;
    Score best{0, 0, 0, -1, 0};
    for (int s = 0; s < 2; ++s) {
        SwapNetwork net = sort_network(init, rank, p.required, s, false);
        long v = 1000L * net.uncovered + net.depth();
        if (best.parity < 0 || v < best.value) best = {v, net.depth(), net.uncovered, s, 0};
    }
    if (best.uncovered == 0) {
        best.extra = cache(p, init);
        best.value += 3L * best.extra;
    }
    return best;
}

}  // namespace detail

/// Simulated annealing over the free blocks; stops at the first layout whose
/// network covers every required pair within target_depth rounds.
inline SearchResult search_network(NetworkProblem problem, const SearchOptions &opt = {}) {
    if (detail::concat(problem.init_blocks).size() != static_cast<std::size_t>(problem.n_modes) ||
        detail::concat(problem.target_blocks).size() != static_cast<std::size_t>(problem.n_modes))
        throw SpecError("network blocks must cover every mode exactly once");
    struct Handle {
        bool init;
        std::size_t index;
        double weight;
    };
    std::vector<Handle> handles;
    double total = 0.0;
    for (std::size_t i = 0; i < problem.init_blocks.size(); ++i)
        if (problem.init_blocks[i].free && problem.init_blocks[i].modes.size() > 1) {
            handles.push_back({true, i, problem.init_blocks[i].weight});
            total += problem.init_blocks[i].weight;
        }
    for (std::size_t i = 0; i < problem.target_blocks.size(); ++i)
        if (problem.target_blocks[i].free && problem.target_blocks[i].modes.size() > 1) {
            handles.push_back({false, i, problem.target_blocks[i].weight});
            total += problem.target_blocks[i].weight;
        }

    auto done = [&](const detail::Score &s) {
        return s.uncovered == 0 && s.depth <= problem.target_depth && s.extra == 0;
    };
    detail::CostCache cache;
    NetworkProblem best_problem = problem;
    detail::Score best = detail::score_problem(problem, cache);
    int iterations = 0;
    for (int restart = 0; restart < opt.restarts && !done(best) && !handles.empty(); ++restart) {
        std::mt19937_64 rng(opt.seed + 7919u * restart);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        NetworkProblem cur_problem = problem;
        detail::Score cur = detail::score_problem(cur_problem, cache);
        double T = 5.0;
        for (int it = 0; it < opt.max_iters && !done(best); ++it, ++iterations) {
            double r = unit(rng) * total;
            std::size_t h = 0;
            while (h + 1 < handles.size() && r >= handles[h].weight) r -= handles[h++].weight;
            NetworkProblem cand = cur_problem;
            auto &modes = handles[h].init ? cand.init_blocks[handles[h].index].modes : cand.target_blocks[handles[h].index].modes;
            std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
            std::size_t a = pick(rng), b = pick(rng);
            std::swap(modes[a], modes[b]);
            detail::Score s = detail::score_problem(cand, cache);
            if (s.value <= cur.value || unit(rng) < std::exp(static_cast<double>(cur.value - s.value) / T)) {
                cur_problem = std::move(cand);
                cur = s;
                if (s.value < best.value) {
                    best = s;
                    best_problem = cur_problem;
                }
            }
            T = std::max(0.05, T * 0.9997);
        }
    }
    std::vector<int> init = detail::concat(best_problem.init_blocks), target = detail::concat(best_problem.target_blocks);
    std::vector<int> rank(problem.n_modes);
    for (int i = 0; i < problem.n_modes; ++i) rank[target[i]] = i;
    SearchResult out;
    out.network = sort_network(init, rank, problem.required, best.parity, true);
    out.start_parity = best.parity;
    out.iterations = iterations;
    out.reached_target = done(best);
    out.init_cost = best.extra;
    return out;
}

}  // namespace dmetvqe

#endif  // DMETVQE_SWAP_NETWORK_HPP
