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

#ifndef DMETVQE_SOLVER_HPP
#define DMETVQE_SOLVER_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ansatz.hpp"
#include "embedding.hpp"
#include "errors.hpp"
#include "measure.hpp"
#include "statevector.hpp"

namespace dmetvqe {

/// Computational basis states of fixed (n_up, n_down) on a qubit layout.
struct SectorBasis {
    int n_orb = 0, n_up = 0, n_down = 0;
    QubitLayout layout;
    std::vector<std::uint64_t> states;  // sector index -> full-register index
    std::vector<std::int32_t> index;    // full-register index -> sector index or -1

    SectorBasis(int orbitals, int up, int down, QubitLayout l) : n_orb(orbitals), n_up(up), n_down(down), layout(std::move(l)) {
        if (up < 0 || down < 0 || up > orbitals || down > orbitals) throw SpecError("sector occupation out of range");
        const std::uint64_t full = std::uint64_t{1} << (2 * orbitals);
        const std::uint64_t low = (std::uint64_t{1} << orbitals) - 1;
        index.assign(full, -1);
        for (std::uint64_t k = 0; k < full; ++k)
            if (std::popcount(k & low) == up && std::popcount(k >> orbitals) == down) {
                index[k] = static_cast<std::int32_t>(states.size());
                states.push_back(k);
            }
    }

    std::size_t size() const { return states.size(); }

    StateVector embed(const Eigen::VectorXd &v) const {
        StateVector s(2 * n_orb);
        s.amp[0] = 0.0;
        for (std::size_t k = 0; k < states.size(); ++k) s.amp[states[k]] = v(static_cast<Eigen::Index>(k));
        return s;
    }
};

/// Sparse matrix of H in the sector, Jordan-Wigner order of the layout.
inline Eigen::SparseMatrix<double> sector_hamiltonian(const EmbeddedHamiltonian &H, const SectorBasis &basis) {
    const int n = H.orbitals();
    Eigen::MatrixXd Q = H.quadratic();
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const std::uint64_t k = basis.states[col];
        double diag = 0.0;
        for (int i = 0; i < n; ++i)
            for (int spin = 0; spin < 2; ++spin)
                if (k >> basis.layout.qubit(i, spin) & 1) diag += Q(i, i);
        for (int i = 0; i < H.n_frag; ++i)
            if ((k >> basis.layout.qubit(i, 0) & 1) && (k >> basis.layout.qubit(i, 1) & 1)) diag += H.U;
        trip.emplace_back(static_cast<int>(col), static_cast<int>(col), diag);
        for (int spin = 0; spin < 2; ++spin)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j || Q(i, j) == 0.0) continue;
                    const int p = basis.layout.qubit(i, spin), q = basis.layout.qubit(j, spin);
                    if (!(k >> q & 1) || (k >> p & 1)) continue;
                    const int lo = std::min(p, q), hi = std::max(p, q);
                    const std::uint64_t between = ((std::uint64_t{1} << hi) - 1) & ~((std::uint64_t{1} << (lo + 1)) - 1);
                    const double sign = (std::popcount(k & between) & 1) ? -1.0 : 1.0;
                    const std::uint64_t k2 = k ^ (std::uint64_t{1} << p) ^ (std::uint64_t{1} << q);
                    trip.emplace_back(basis.index[k2], static_cast<int>(col), sign * Q(i, j));
                }
    }
    Eigen::SparseMatrix<double> M(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(basis.size()));
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

struct LanczosResult {
    double value = 0.0;
    Eigen::VectorXd vector;
    int iterations = 0;
    bool converged = false;
};

/// Lowest eigenpair of a symmetric sparse matrix: Lanczos with full
/// reorthogonalization, restarted from the current Ritz vector.
inline LanczosResult lanczos_lowest(const Eigen::SparseMatrix<double> &M, double tol = 1e-10, int krylov = 120, int restarts = 30) {
    const Eigen::Index dim = M.rows();
    LanczosResult out;
    std::mt19937_64 rng(0x1a2c05);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd start(dim);
    for (Eigen::Index k = 0; k < dim; ++k) start(k) = unit(rng);
    start.normalize();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(krylov, dim));
    for (int restart = 0; restart < restarts; ++restart) {
        Eigen::MatrixXd V(dim, m_max);
        std::vector<double> alpha, beta;
        V.col(0) = start;
        int m = 0;
        double residual = 0.0;
        for (int j = 0; j < m_max; ++j) {
            Eigen::VectorXd w = M * V.col(j);
            double a = V.col(j).dot(w);
            alpha.push_back(a);
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
            double b = w.norm();
            m = j + 1;
            ++out.iterations;
            residual = b;
            if (b < 1e-14 || j + 1 == m_max) break;
            beta.push_back(b);
            V.col(j + 1) = w / b;
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success) throw EigenSolverFailure("tridiagonal eigensolver did not converge");
        Eigen::VectorXd y = es.eigenvectors().col(0);
        out.value = es.eigenvalues()(0);
        out.vector = V.leftCols(m) * y;
        out.vector.normalize();
        double err = (M * out.vector - out.value * out.vector).norm();
        if (err < tol || residual * std::abs(y(m - 1)) < tol * 1e-2) {
            out.converged = err < std::sqrt(tol);
            if (out.converged) return out;
        }
        start = out.vector;
    }
    return out;
}

inline constexpr std::size_t kDenseSectorLimit = 4096;

struct EDResult {
    double energy = 0.0;
    StateVector state;          // full register, in `layout`
    Eigen::VectorXd sector;     // amplitudes over the sector basis
    std::size_t dimension = 0;
    bool iterative = false;
};

/// Ground state of H in the (n_up, n_down) sector: dense up to 4096 states,
/// Lanczos above.
inline EDResult exact_diagonalize(const EmbeddedHamiltonian &H, const QubitLayout &layout) {
    SectorBasis basis(H.orbitals(), H.n_up(), H.n_down(), layout);
    if (basis.size() == 0) throw SpecError("empty particle-number sector");
    auto M = sector_hamiltonian(H, basis);
    EDResult out;
    out.dimension = basis.size();
    if (basis.size() <= kDenseSectorLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(M)};
        if (es.info() != Eigen::Success) throw EigenSolverFailure("sector eigensolver did not converge");
        out.energy = es.eigenvalues()(0);
        out.sector = es.eigenvectors().col(0);
    } else {
        auto r = lanczos_lowest(M);
        if (!r.converged) throw EigenSolverFailure("Lanczos did not reach tolerance");
        out.energy = r.value;
        out.sector = r.vector;
        out.iterative = true;
    }
    out.state = basis.embed(out.sector);
    return out;
}

inline EDResult exact_diagonalize(const EmbeddedHamiltonian &H) { return exact_diagonalize(H, QubitLayout::identity(H.orbitals())); }

/// A circuit compiled onto the compact amplitudes of one number sector. Every
/// gate becomes a list of sector index pairs or indices; the energy is
/// psi^dag H psi with the sparse sector Hamiltonian.
class SectorCircuit {
  public:
    SectorCircuit(const Circuit &c, const EmbeddedHamiltonian &H, const QubitLayout &layout)
        : basis_(H.orbitals(), H.n_up(), H.n_down(), layout), H_(sector_hamiltonian(H, basis_)) {
        if (c.n_qubits != 2 * H.orbitals()) throw SpecError("circuit and Hamiltonian sizes disagree");
        n_slots_ = c.n_slots;
        for (const CircuitLayer &layer : c.layers) {
            // An S^dagger pair after a folded hop on the same qubits is merged into it.
            std::vector<char> fused(layer.post.size(), 0);
            std::vector<std::pair<Gate, bool>> flat;
            for (const Gate &g : layer.gates) {
                bool with_s = false;
                if (g.kind == GateKind::Hopping)
                    for (std::size_t k = 0; k < layer.post.size(); ++k) {
                        const Gate &p = layer.post[k];
                        if (!fused[k] && p.kind == GateKind::SCorrection && p.q0 == g.q0 && p.q1 == g.q1) {
                            fused[k] = 1;
                            with_s = true;
                            break;
                        }
                    }
                flat.push_back({g, with_s});
            }
            for (std::size_t k = 0; k < layer.post.size(); ++k)
                if (!fused[k]) flat.push_back({layer.post[k], false});
            for (const auto &[g, with_s] : flat) compile(g, with_s);
        }
        for (const CircuitLayer &layer : c.restore)
            for (const Gate &g : layer.gates) compile(g, false);
        flush();
    }

    const SectorBasis &basis() const { return basis_; }
    std::size_t dimension() const { return basis_.size(); }

    Eigen::VectorXcd compress(const StateVector &s) const {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(basis_.size()));
        for (std::size_t k = 0; k < basis_.size(); ++k) v(static_cast<Eigen::Index>(k)) = s.amp[basis_.states[k]];
        return v;
    }

    StateVector expand(const Eigen::VectorXcd &v) const {
        StateVector s(2 * basis_.n_orb);
        s.amp[0] = 0.0;
        for (std::size_t k = 0; k < basis_.size(); ++k) s.amp[basis_.states[k]] = v(static_cast<Eigen::Index>(k));
        s.restrict_to_sector(basis_.n_orb, basis_.n_up, basis_.n_down);
        return s;
    }

    void run(Eigen::VectorXcd &v, const std::vector<double> &theta) const {
        if (static_cast<int>(theta.size()) != n_slots_) throw SpecError("parameter vector length mismatch");
        cplx *a = v.data();
        std::vector<cplx> table;
        for (const Op &op : ops_) {
            if (!op.diagonal.empty()) {
                const std::size_t g = op.diagonal.size();
                table.assign(std::size_t{1} << g, cplx(1.0));
                for (std::size_t j = 0; j < g; ++j) {
                    const cplx ph = diagonal_factor(op.diagonal[j], theta);
                    const std::size_t bit = std::size_t{1} << j;
                    for (std::size_t m = bit; m < table.size(); ++m)
                        if (m & bit) table[m] *= ph;
                }
                for (std::size_t e = 0; e < op.diag.size(); ++e) a[op.diag[e]] *= table[op.masks[e]];
                continue;
            }
            const double phi = op.gate.angle(theta);
            switch (op.gate.kind) {
                case GateKind::Hopping: {
                    const double c = std::cos(phi), sn = std::sin(phi);
                    if (op.with_s) {
                        // exp(i phi (XX+YY)/2) then S^dagger on both qubits
                        for (auto [i01, i10] : op.pairs) {
                            cplx x = a[i01], y = a[i10];
                            cplx nx = c * x + cplx(-sn * y.imag(), sn * y.real());
                            cplx ny = cplx(-sn * x.imag(), sn * x.real()) + c * y;
                            a[i01] = cplx(nx.imag(), -nx.real());
                            a[i10] = cplx(ny.imag(), -ny.real());
                        }
                        for (std::int32_t k : op.diag) a[k] = -a[k];
                    } else {
                        for (auto [i01, i10] : op.pairs) {
                            cplx x = a[i01], y = a[i10];
                            a[i01] = c * x + cplx(-sn * y.imag(), sn * y.real());
                            a[i10] = cplx(-sn * x.imag(), sn * x.real()) + c * y;
                        }
                    }
                    break;
                }
                case GateKind::Givens: {
                    const double c = std::cos(phi), sn = std::sin(phi);
                    for (auto [i01, i10] : op.pairs) {
                        cplx x01 = a[i01], x10 = a[i10];
                        a[i10] = c * x10 - sn * x01;
                        a[i01] = sn * x10 + c * x01;
                    }
                    break;
                }
                case GateKind::MBasis: {
                    const double r = std::numbers::sqrt2 / 2;
                    for (auto [i01, i10] : op.pairs) {
                        cplx x = a[i01], y = a[i10];
                        a[i01] = r * (x + y);
                        a[i10] = r * (x - y);
                    }
                    break;
                }
                case GateKind::FSWAP:
                    for (auto [i01, i10] : op.pairs) std::swap(a[i01], a[i10]);
                    for (std::int32_t k : op.diag) a[k] = -a[k];
                    break;
                default: break;
            }
        }
    }

    double energy(const Eigen::VectorXcd &v) const {
        Eigen::VectorXcd hv = H_ * v;
        return v.dot(hv).real();
    }

  private:
    static constexpr std::size_t kMaxDiagonalGroup = 8;

    struct Op {
        Gate gate;
        bool with_s = false;
        std::vector<std::pair<std::int32_t, std::int32_t>> pairs;  // (|b_p b_q> = |01>, |10>)
        std::vector<std::int32_t> diag;
        std::vector<Gate> diagonal;      // batched diagonal gates
        std::vector<std::uint8_t> masks;  // per diag entry: which batched gates act
    };

    static bool is_diagonal(GateKind k) {
        return k == GateKind::OnsitePhase || k == GateKind::NumberPhase || k == GateKind::CZ || k == GateKind::SCorrection;
    }

    static cplx diagonal_factor(const Gate &g, const std::vector<double> &theta) {
        switch (g.kind) {
            case GateKind::CZ: return -1.0;
            case GateKind::SCorrection: return cplx(0, -1);
            default: return std::polar(1.0, g.angle(theta));
        }
    }

    void flush() {
        if (pending_.empty()) return;
        Op op;
        op.diagonal = pending_;
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            const std::uint64_t x = basis_.states[k];
            std::uint8_t m = 0;
            for (std::size_t j = 0; j < pending_.size(); ++j) {
                const Gate &g = pending_[j];
                std::uint64_t mask = std::uint64_t{1} << g.q0;
                if (g.q1 >= 0) mask |= std::uint64_t{1} << g.q1;
                if ((x & mask) == mask) m |= static_cast<std::uint8_t>(1u << j);
            }
            if (m) {
                op.diag.push_back(static_cast<std::int32_t>(k));
                op.masks.push_back(m);
            }
        }
        ops_.push_back(std::move(op));
        pending_.clear();
    }

    void compile(const Gate &g, bool with_s) {
        if (is_diagonal(g.kind)) {
            if (g.kind == GateKind::SCorrection && g.q1 >= 0) {
                // S^dagger on two qubits: -i where exactly one bit is set, -1 where both are.
                Gate a = g, b = g;
                a.q1 = -1;
                b.q0 = g.q1;
                b.q1 = -1;
                compile(a, false);
                compile(b, false);
                return;
            }
            pending_.push_back(g);
            if (pending_.size() == kMaxDiagonalGroup) flush();
            return;
        }
        flush();
        Op op;
        op.gate = g;
        op.with_s = with_s;
        const std::uint64_t bp = std::uint64_t{1} << g.q0, bq = std::uint64_t{1} << g.q1;
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            std::uint64_t x = basis_.states[k];
            if ((x & bq) && !(x & bp)) {
                std::int32_t partner = basis_.index[x ^ bq ^ bp];
                if (partner < 0) throw ConsistencyBreach("gate leaves the particle-number sector");
                op.pairs.push_back({static_cast<std::int32_t>(k), partner});
            }
            const bool fswap_sign = g.kind == GateKind::FSWAP && !fault_fswap_sign.load(std::memory_order_relaxed);
            if ((fswap_sign || with_s) && (x & bp) && (x & bq)) op.diag.push_back(static_cast<std::int32_t>(k));
        }
        ops_.push_back(std::move(op));
    }

    SectorBasis basis_;
    Eigen::SparseMatrix<double> H_;
    std::vector<Op> ops_;
    std::vector<Gate> pending_;
    int n_slots_ = 0;
};

using Objective = std::function<double(const std::vector<double> &)>;

struct SPSAConfig {
    double a = 2.0, A = 10.0, alpha = 0.602, c = 0.2, gamma = 0.101;
    int max_iters = 2000;
    std::uint64_t seed = 1;
    int keep_last = 10;  // iterates re-evaluated at the end
};

inline int default_spsa_iterations(int n_frag) { return n_frag <= 1 ? 2000 : 10000; }

struct LBFGSConfig {
    double gradient_tol = 1e-8;
    double fd_step = 1e-5;
    int history = 10;
    int max_iters = 2000;
    double stall_tol = 1e-13;  // relative decrease counted as no progress
    int stall_iters = 10;      // consecutive no-progress iterations before stopping
};

struct OptimizerTrace {
    int iteration = 0;
    double energy = 0.0;
    long evaluations = 0;
};

struct OptimizeResult {
    std::vector<double> theta;
    double value = 0.0;
    long evaluations = 0;
    bool converged = false;
    std::vector<OptimizerTrace> history;
    std::string note;
};

/// SPSA with gain schedules a_k = a/(k+1+A)^alpha, c_k = c/(k+1)^gamma. The
/// last `keep_last` iterates are re-scored with `final_eval` and the lowest
/// wins; without `final_eval` the objective itself is used.
inline OptimizeResult spsa_minimize(const Objective &f, std::vector<double> theta, const SPSAConfig &cfg,
                                    const Objective &final_eval = nullptr) {
    OptimizeResult out;
    const std::size_t n = theta.size();
    auto rng = make_rng(cfg.seed, 0x5b5a);
    std::bernoulli_distribution coin(0.5);
    std::deque<std::vector<double>> recent;
    std::vector<double> plus(n), minus(n), delta(n);
    for (int k = 0; k < cfg.max_iters && n > 0; ++k) {
        const double ak = cfg.a / std::pow(k + 1 + cfg.A, cfg.alpha);
        const double ck = cfg.c / std::pow(k + 1, cfg.gamma);
        for (std::size_t i = 0; i < n; ++i) {
            delta[i] = coin(rng) ? 1.0 : -1.0;
            plus[i] = theta[i] + ck * delta[i];
            minus[i] = theta[i] - ck * delta[i];
        }
        const double fp = f(plus), fm = f(minus);
        out.evaluations += 2;
        const double g = (fp - fm) / (2.0 * ck);
        for (std::size_t i = 0; i < n; ++i) theta[i] -= ak * g * delta[i];
        out.history.push_back({k, 0.5 * (fp + fm), out.evaluations});
        recent.push_back(theta);
        if (static_cast<int>(recent.size()) > cfg.keep_last) recent.pop_front();
    }
    if (recent.empty()) recent.push_back(theta);
    const Objective &score = final_eval ? final_eval : f;
    out.value = std::numeric_limits<double>::infinity();
    for (const auto &cand : recent) {
        double v = score(cand);
        ++out.evaluations;
        if (v < out.value) {
            out.value = v;
            out.theta = cand;
        }
    }
    out.converged = true;
    return out;
}

/// Central finite-difference gradient.
inline std::vector<double> fd_gradient(const Objective &f, const std::vector<double> &x, double h, long &evaluations) {
    std::vector<double> g(x.size()), y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        double fp = f(y);
        y[i] = x[i] - h;
        double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    evaluations += 2 * static_cast<long>(x.size());
    return g;
}

/// L-BFGS (two-loop recursion, Armijo backtracking) on a deterministic
/// objective with finite-difference gradients. Accepted iterates never raise
/// the objective.
inline OptimizeResult quasi_newton_minimize(const Objective &f, std::vector<double> x, const LBFGSConfig &cfg = {}) {
    OptimizeResult out;
    const std::size_t n = x.size();
    auto dot = [](const std::vector<double> &a, const std::vector<double> &b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    double fx = f(x);
    ++out.evaluations;
    out.history.push_back({0, fx, out.evaluations});
    if (n == 0) {
        out.theta = x;
        out.value = fx;
        out.converged = true;
        return out;
    }
    std::vector<double> g = fd_gradient(f, x, cfg.fd_step, out.evaluations);
    std::deque<std::vector<double>> S, Y;
    std::deque<double> R;
    int stalled = 0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        double gnorm = std::sqrt(dot(g, g));
        if (gnorm < cfg.gradient_tol) {
            out.converged = true;
            break;
        }
        std::vector<double> q = g;
        std::vector<double> a(S.size());
        for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
            a[k] = R[k] * dot(S[k], q);
            for (std::size_t i = 0; i < n; ++i) q[i] -= a[k] * Y[k][i];
        }
        double gamma = S.empty() ? 1.0 / std::max(1.0, gnorm) : dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
        for (double &v : q) v *= gamma;
        for (std::size_t k = 0; k < S.size(); ++k) {
            double b = R[k] * dot(Y[k], q);
            for (std::size_t i = 0; i < n; ++i) q[i] += S[k][i] * (a[k] - b);
        }
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = -q[i];
        double slope = dot(g, d);
        if (slope >= 0) {
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = -gnorm * gnorm;
            S.clear(), Y.clear(), R.clear();
        }
        double step = 1.0, fn = fx;
        std::vector<double> xn(n);
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
            fn = f(xn);
            ++out.evaluations;
            if (fn <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || fn > fx) {
            out.note = "line search failed; returning best iterate";
            break;
        }
        std::vector<double> gn = fd_gradient(f, xn, cfg.fd_step, out.evaluations);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = xn[i] - x[i], y[i] = gn[i] - g[i];
        double sy = dot(s, y);
        if (sy > 1e-16) {
            S.push_back(s), Y.push_back(y), R.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > cfg.history) S.pop_front(), Y.pop_front(), R.pop_front();
        }
        stalled = fx - fn <= cfg.stall_tol * std::max(1.0, std::abs(fx)) ? stalled + 1 : 0;
        x = xn;
        fx = fn;
        g = gn;
        if (stalled >= cfg.stall_iters) {
            out.note = "stopped on stalled progress";
            out.history.push_back({it, fx, out.evaluations});
            break;
        }
        out.history.push_back({it, fx, out.evaluations});
    }
    out.theta = x;
    out.value = fx;
    return out;
}

enum class VQEMode { Exact, Sampled };
enum class OptimizerKind { LBFGS, SPSA };

inline const char *to_string(VQEMode m) { return m == VQEMode::Exact ? "exact" : "sampled"; }
inline const char *to_string(OptimizerKind o) { return o == OptimizerKind::LBFGS ? "lbfgs" : "spsa"; }

inline OptimizerKind parse_optimizer(const std::string &s) {
    if (s == "lbfgs" || s == "l-bfgs") return OptimizerKind::LBFGS;
    if (s == "spsa") return OptimizerKind::SPSA;
    throw SpecError("unknown optimizer '" + s + "'");
}

struct VQEOptions {
    VQEMode mode = VQEMode::Exact;
    OptimizerKind optimizer = OptimizerKind::LBFGS;
    Variant variant = Variant::HVMin;
    int depth = 1;
    std::uint64_t shots = 10000;
    std::uint64_t final_shots = 100000;
    bool error_detection = false;
    bool compute_fidelity = false;
    double start_jitter = 1e-2;  // zero is a stationary point for gradient methods
    std::uint64_t seed = 1;
    SPSAConfig spsa;
    LBFGSConfig lbfgs;
};

struct VQEResult {
    std::vector<double> theta;
    double energy = 0.0;
    long evaluations = 0;
    std::vector<OptimizerTrace> history;
    std::optional<double> fidelity;
    StateVector state;            // final state in the measurement layout
    Eigen::MatrixXd one_rdm;      // spin-summed
    Eigen::VectorXd double_occ;   // fragment orbitals
    bool converged = false;
    std::string note;
};

/// VQE for the embedded Hamiltonians of one embedding: the network and
/// measurement plan depend only on the term structure and are built once.
class VQESolver {
  public:
    VQESolver(const TermStructure &structure, Geometry g, const FragmentSpec &f, const SearchOptions &search = {})
        : structure_(structure), schedule_(build_network(g, f, structure, search)) {
        plan_ = plan_embedded(structure_, schedule_.initial_layout(), schedule_.measurement_target);
    }

    const NetworkSchedule &schedule() const { return schedule_; }
    const MeasurementPlan &plan() const { return plan_; }
    const TermStructure &structure() const { return structure_; }
    QubitLayout layout() const { return schedule_.initial_layout(); }

    Circuit circuit(const EmbeddedHamiltonian &H, Variant v, int depth) const {
        return realize(schedule_, bind(schedule_, v, structure_, H.mu), H.U, depth);
    }

    StateVector initial_state(const EmbeddedHamiltonian &H) const {
        return prepare_slater(H.quadratic(), H.n_up(), H.n_down(), layout()).state;
    }

    static StateVector state(const Circuit &c, const StateVector &init, const std::vector<double> &theta) {
        StateVector s = init;
        run_circuit(c, theta, s);
        return s;
    }

    VQEResult solve(const EmbeddedHamiltonian &H, const VQEOptions &opt, const std::vector<double> &warm = {}) const {
        if (opt.depth < 0) throw SpecError("ansatz depth must be non-negative");
        const Circuit c = circuit(H, opt.variant, opt.depth);
        const StateVector init = initial_state(H);
        const QubitLayout lay = layout();
        std::vector<double> theta0(c.n_slots, 0.0);
        if (static_cast<int>(warm.size()) == c.n_slots) {
            theta0 = warm;
        } else if (opt.optimizer == OptimizerKind::LBFGS && opt.start_jitter > 0) {
            auto rng = make_rng(opt.seed, 0x1b5f);
            std::uniform_real_distribution<double> u(-opt.start_jitter, opt.start_jitter);
            for (double &t : theta0) t = u(rng);
        }
        long counter = 0;
        std::optional<SectorCircuit> compact;
        Eigen::VectorXcd start;
        if (opt.mode == VQEMode::Exact) {
            compact.emplace(c, H, lay);
            start = compact->compress(init);
        }
        Objective exact_f = [&](const std::vector<double> &th) {
            Eigen::VectorXcd v = start;
            compact->run(v, th);
            return compact->energy(v);
        };
        auto sampled = [&](const std::vector<double> &th, std::uint64_t shots) {
            EstimatorOptions eo;
            eo.shots = shots;
            eo.error_detection = opt.error_detection;
            eo.seed = opt.spsa.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(++counter);
            return estimate_energy(H, plan_, state(c, init, th), eo);
        };
        Objective sampled_f = [&](const std::vector<double> &th) { return sampled(th, opt.shots).energy; };
        Objective final_f = [&](const std::vector<double> &th) { return sampled(th, opt.final_shots).energy; };

        OptimizeResult r;
        const Objective &obj = opt.mode == VQEMode::Exact ? exact_f : sampled_f;
        if (opt.optimizer == OptimizerKind::LBFGS) {
            if (opt.mode != VQEMode::Exact) throw SpecError("the quasi-Newton optimizer needs exact expectations");
            r = quasi_newton_minimize(obj, theta0, opt.lbfgs);
        } else {
            r = spsa_minimize(obj, theta0, opt.spsa, opt.mode == VQEMode::Exact ? Objective{} : final_f);
        }
        VQEResult out;
        out.theta = r.theta;
        out.evaluations = r.evaluations;
        out.history = r.history;
        out.converged = r.converged;
        out.note = r.note;
        out.state = state(c, init, out.theta);
        if (opt.mode == VQEMode::Exact) {
            EnergyBreakdown b = measure_terms(H, out.state, lay);
            out.energy = b.energy;
            out.one_rdm = b.one_rdm;
            out.double_occ = b.double_occ;
        } else {
            EstimatorOptions eo;
            eo.shots = opt.final_shots;
            eo.error_detection = opt.error_detection;
            eo.seed = opt.spsa.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(++counter);
            EstimatorResult e = estimate_energy(H, plan_, out.state, eo);
            ++out.evaluations;
            out.energy = e.energy;
            out.one_rdm = e.one_rdm;
            out.double_occ = e.double_occ;
        }
        if (opt.compute_fidelity) out.fidelity = fidelity(exact_diagonalize(H, lay).state, out.state);
        return out;
    }

  private:
    TermStructure structure_;
    NetworkSchedule schedule_;
    MeasurementPlan plan_;
};

}  // namespace dmetvqe

#endif  // DMETVQE_SOLVER_HPP
