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

#ifndef DMETVQE_STATEVECTOR_HPP
#define DMETVQE_STATEVECTOR_HPP

#include <Eigen/Dense>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "embedding.hpp"
#include "errors.hpp"

namespace dmetvqe {

using cplx = std::complex<double>;

struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amp;
    /// Optional list of the only indices that may hold nonzero amplitude. It
    /// must be closed under every gate applied (per-spin number conserving).
    std::shared_ptr<const std::vector<std::uint64_t>> support;

    StateVector() = default;
    explicit StateVector(int n) : n_qubits(n), amp(std::size_t{1} << n, cplx(0.0)) { amp[0] = 1.0; }

    static StateVector basis(int n, std::uint64_t index) {
        StateVector s(n);
        s.amp[0] = 0.0;
        s.amp[index] = 1.0;
        return s;
    }

    std::size_t dim() const { return amp.size(); }

    /// Restricts work to states with n_up ones in qubits [0, n_orb) and
    /// n_down ones in [n_orb, 2 n_orb).
    void restrict_to_sector(int n_orb, int n_up, int n_down) {
        if (2 * n_orb != n_qubits) throw SpecError("sector needs two spin blocks of equal size");
        auto idx = std::make_shared<std::vector<std::uint64_t>>();
        const std::uint64_t low = (std::uint64_t{1} << n_orb) - 1;
        for (std::uint64_t k = 0; k < dim(); ++k) {
            if (std::popcount(k & low) == n_up && std::popcount(k >> n_orb) == n_down) idx->push_back(k);
            else if (amp[k] != cplx(0.0)) throw SpecError("state has weight outside the requested sector");
        }
        support = std::move(idx);
    }

    template <typename F>
    void for_each_index(F &&f) const {
        if (support) {
            for (std::uint64_t k : *support) f(k);
        } else {
            for (std::uint64_t k = 0; k < dim(); ++k) f(k);
        }
    }

    double norm() const {
        double acc = 0.0;
        for (const cplx &a : amp) acc += std::norm(a);
        return std::sqrt(acc);
    }
};

inline double fidelity(const StateVector &a, const StateVector &b) {
    cplx ov = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) ov += std::conj(a.amp[k]) * b.amp[k];
    return std::norm(ov);
}

/// Position of each embedded orbital on the Jordan-Wigner line of one spin
/// sector. Up orbitals occupy qubits [0, n_orb), down orbitals [n_orb, 2 n_orb).
struct QubitLayout {
    std::vector<int> position;  // orbital -> position

    int orbitals() const { return static_cast<int>(position.size()); }
    int qubit(int orbital, int spin) const { return position[orbital] + spin * orbitals(); }

    static QubitLayout identity(int n_orb) {
        QubitLayout l;
        for (int i = 0; i < n_orb; ++i) l.position.push_back(i);
        return l;
    }

    /// Inverse map: position -> orbital.
    std::vector<int> line() const {
        std::vector<int> out(position.size());
        for (int i = 0; i < orbitals(); ++i) out[position[i]] = i;
        return out;
    }

    static QubitLayout from_line(const std::vector<int> &line) {
        QubitLayout l;
        l.position.resize(line.size());
        for (int p = 0; p < static_cast<int>(line.size()); ++p) l.position[line[p]] = p;
        return l;
    }

    bool operator==(const QubitLayout &o) const { return position == o.position; }
};

enum class GateKind { Hopping, FSWAP, OnsitePhase, NumberPhase, CZ, MBasis, Givens, SCorrection };

inline const char *to_string(GateKind k) {
    switch (k) {
        case GateKind::Hopping: return "hopping";
        case GateKind::FSWAP: return "fswap";
        case GateKind::OnsitePhase: return "onsite";
        case GateKind::NumberPhase: return "number";
        case GateKind::CZ: return "cz";
        case GateKind::MBasis: return "mbasis";
        case GateKind::Givens: return "givens";
        default: return "s_correction";
    }
}

/// One gate. The applied angle is scale * theta[slot] + offset, or just
/// offset when slot < 0. SCorrection applies S^dagger to q0 and, if set, q1.
struct Gate {
    GateKind kind = GateKind::FSWAP;
    int q0 = 0;
    int q1 = -1;
    double offset = 0.0;
    int slot = -1;
    double scale = 1.0;

    double angle(const std::vector<double> &theta) const {
        return slot < 0 ? offset : scale * theta[static_cast<std::size_t>(slot)] + offset;
    }
    bool two_qubit() const { return q1 >= 0 && kind != GateKind::SCorrection; }
};

namespace detail {

inline std::uint64_t insert_zero(std::uint64_t x, int bit) {
    std::uint64_t low = x & ((std::uint64_t{1} << bit) - 1);
    return ((x >> bit) << (bit + 1)) | low;
}

/// Calls f(i00) for every index whose bits p and q are zero. With a support
/// list only pairs whose |b_p b_q> = |01> member is supported are visited.
template <typename F>
inline void for_pairs(const StateVector &s, int p, int q, F &&f) {
    if (s.support) {
        const std::uint64_t bp = std::uint64_t{1} << p, bq = std::uint64_t{1} << q;
        for (std::uint64_t k : *s.support)
            if ((k & bq) && !(k & bp)) f(k ^ bq);
        return;
    }
    int lo = std::min(p, q), hi = std::max(p, q);
    std::uint64_t count = std::uint64_t{1} << (s.n_qubits - 2);
    for (std::uint64_t i = 0; i < count; ++i) f(insert_zero(insert_zero(i, lo), hi));
}

/// Calls f(k) for every supported index with all bits of mask set.
template <typename F>
inline void for_set(const StateVector &s, std::uint64_t mask, F &&f) {
    if (s.support) {
        for (std::uint64_t k : *s.support)
            if ((k & mask) == mask) f(k);
        return;
    }
    const int free_bits = s.n_qubits - std::popcount(mask);
    const std::uint64_t count = std::uint64_t{1} << free_bits;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t k = i;
        for (int b = 0; b < s.n_qubits; ++b)
            if (mask >> b & 1) k = insert_zero(k, b);
        f(k | mask);
    }
}

inline void check_qubit(const StateVector &s, int q) {
    if (q < 0 || q >= s.n_qubits) throw SpecError("qubit index out of range");
}

}  // namespace detail

inline void apply_hopping(StateVector &s, int p, int q, double phi) {
    detail::check_qubit(s, p);
    detail::check_qubit(s, q);
    const double c = std::cos(phi), sn = std::sin(phi);
    const std::uint64_t bp = std::uint64_t{1} << p, bq = std::uint64_t{1} << q;
    detail::for_pairs(s, p, q, [&](std::uint64_t i) {
        cplx &a = s.amp[i | bq], &b = s.amp[i | bp];
        cplx a0 = a, b0 = b;
        a = c * a0 + cplx(0, sn) * b0;
        b = cplx(0, sn) * a0 + c * b0;
    });
}

/// Fault injection for mutation checks: when set, FSWAP omits its sign on |11>.
inline std::atomic<bool> fault_fswap_sign{false};

inline void apply_fswap(StateVector &s, int p, int q) {
    detail::check_qubit(s, p);
    detail::check_qubit(s, q);
    const std::uint64_t bp = std::uint64_t{1} << p, bq = std::uint64_t{1} << q;
    detail::for_pairs(s, p, q, [&](std::uint64_t i) { std::swap(s.amp[i | bp], s.amp[i | bq]); });
    if (fault_fswap_sign.load(std::memory_order_relaxed)) return;
    detail::for_set(s, bp | bq, [&](std::uint64_t k) { s.amp[k] = -s.amp[k]; });
}

inline void apply_controlled_phase(StateVector &s, int p, int q, cplx phase) {
    detail::check_qubit(s, p);
    detail::check_qubit(s, q);
    const std::uint64_t mask = (std::uint64_t{1} << p) | (std::uint64_t{1} << q);
    detail::for_set(s, mask, [&](std::uint64_t k) { s.amp[k] *= phase; });
}

inline void apply_phase(StateVector &s, int q, cplx phase) {
    detail::check_qubit(s, q);
    detail::for_set(s, std::uint64_t{1} << q, [&](std::uint64_t k) { s.amp[k] *= phase; });
}

inline void apply_mbasis(StateVector &s, int p, int q) {
    detail::check_qubit(s, p);
    detail::check_qubit(s, q);
    const double r = std::numbers::sqrt2 / 2;
    const std::uint64_t bp = std::uint64_t{1} << p, bq = std::uint64_t{1} << q;
    detail::for_pairs(s, p, q, [&](std::uint64_t i) {
        cplx &a = s.amp[i | bq], &b = s.amp[i | bp];  // |b_p b_q> = |01>, |10>
        cplx a0 = a, b0 = b;
        a = r * (a0 + b0);
        b = r * (a0 - b0);
    });
}

/// Real orbital rotation between line positions p and q:
/// a_p^dag -> c a_p^dag + s a_q^dag, a_q^dag -> -s a_p^dag + c a_q^dag.
inline void apply_givens(StateVector &s, int p, int q, double phi) {
    detail::check_qubit(s, p);
    detail::check_qubit(s, q);
    const double c = std::cos(phi), sn = std::sin(phi);
    const std::uint64_t bp = std::uint64_t{1} << p, bq = std::uint64_t{1} << q;
    detail::for_pairs(s, p, q, [&](std::uint64_t i) {
        cplx &x10 = s.amp[i | bp], &x01 = s.amp[i | bq];
        cplx a = x10, b = x01;
        x10 = c * a - sn * b;
        x01 = sn * a + c * b;
    });
}

inline void apply(StateVector &s, const Gate &g, const std::vector<double> &theta = {}) {
    double phi = g.angle(theta);
    switch (g.kind) {
        case GateKind::Hopping: apply_hopping(s, g.q0, g.q1, phi); break;
        case GateKind::FSWAP: apply_fswap(s, g.q0, g.q1); break;
        case GateKind::OnsitePhase: apply_controlled_phase(s, g.q0, g.q1, std::polar(1.0, phi)); break;
        case GateKind::NumberPhase: apply_phase(s, g.q0, std::polar(1.0, phi)); break;
        case GateKind::CZ: apply_controlled_phase(s, g.q0, g.q1, -1.0); break;
        case GateKind::MBasis: apply_mbasis(s, g.q0, g.q1); break;
        case GateKind::Givens: apply_givens(s, g.q0, g.q1, phi); break;
        case GateKind::SCorrection:
            apply_phase(s, g.q0, cplx(0, -1));
            if (g.q1 >= 0) apply_phase(s, g.q1, cplx(0, -1));
            break;
    }
}

/// exp(i phi (a_i^dag a_j + h.c.)) for i < j via CZ chain, hopping, CZ chain.
/// Returns the number of two-qubit gates used.
inline int apply_long_range_hopping(StateVector &s, double phi, int i, int j) {
    if (i == j) throw SpecError("long-range hopping needs distinct qubits");
    if (i > j) std::swap(i, j);
    for (int k = i + 1; k < j; ++k) apply_controlled_phase(s, k, j, -1.0);
    apply_hopping(s, i, j, phi);
    for (int k = j - 1; k > i; --k) apply_controlled_phase(s, k, j, -1.0);
    return 2 * (j - i - 1) + 1;
}

/// Givens sequence that prepares the Slater determinant with orbitals given by
/// the columns of phi (rows indexed by line position) from |1..10..0>.
/// Gates act on positions offset, offset+1, ... and are listed in application order.
inline std::vector<Gate> slater_givens(Eigen::MatrixXd phi, int offset) {
    const int n = static_cast<int>(phi.rows()), M = static_cast<int>(phi.cols());
    std::vector<Gate> elim;
    for (int j = 0; j < M; ++j)
        for (int i = n - 1; i > j; --i) {
            double a = phi(i - 1, j), b = phi(i, j);
            if (std::abs(b) < 1e-15) continue;
            double phi_angle = std::atan2(b, a);
            double c = std::cos(phi_angle), sn = std::sin(phi_angle);
            Eigen::RowVectorXd r0 = phi.row(i - 1), r1 = phi.row(i);
            phi.row(i - 1) = c * r0 + sn * r1;
            phi.row(i) = -sn * r0 + c * r1;
            Gate g;
            g.kind = GateKind::Givens;
            g.q0 = offset + i - 1;
            g.q1 = offset + i;
            g.offset = phi_angle;
            elim.push_back(g);
        }
    return {elim.rbegin(), elim.rend()};
}

struct SlaterPreparation {
    StateVector state;
    std::vector<Gate> gates;
    bool fermi_degenerate = false;
};

/// Ground Slater determinant of the quadratic Hamiltonian Q (one spin sector,
/// orbital basis) with n_up and n_down electrons, on the given layout.
inline SlaterPreparation prepare_slater(const Eigen::MatrixXd &Q, int n_up, int n_down, const QubitLayout &layout) {
    const int n = static_cast<int>(Q.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    if (es.info() != Eigen::Success) throw EigenSolverFailure("quadratic Hamiltonian eigensolver did not converge");
    SlaterPreparation out;
    std::uint64_t ref = 0;
    for (int spin = 0; spin < 2; ++spin) {
        int m = spin == 0 ? n_up : n_down;
        if (m > 0 && m < n && es.eigenvalues()(m) - es.eigenvalues()(m - 1) < kDegeneracyTol) out.fermi_degenerate = true;
        Eigen::MatrixXd phi(n, m);
        for (int orb = 0; orb < n; ++orb) phi.row(layout.position[orb]) = es.eigenvectors().row(orb).head(m);
        auto gates = slater_givens(phi, spin * n);
        out.gates.insert(out.gates.end(), gates.begin(), gates.end());
        for (int k = 0; k < m; ++k) ref |= std::uint64_t{1} << (spin * n + k);
    }
    out.state = StateVector::basis(2 * n, ref);
    out.state.restrict_to_sector(n, n_up, n_down);
    for (const Gate &g : out.gates) apply(out.state, g);
    return out;
}

/// <a_p^dag a_q + a_q^dag a_p> for line qubits p, q of one spin sector.
inline double hopping_expectation(const StateVector &s, int p, int q) {
    if (p > q) std::swap(p, q);
    const std::uint64_t bp = std::uint64_t{1} << p, bq = std::uint64_t{1} << q;
    const std::uint64_t between = ((std::uint64_t{1} << q) - 1) & ~((bp << 1) - 1);
    cplx acc = 0.0;
    detail::for_pairs(s, p, q, [&](std::uint64_t i) {
        cplx term = std::conj(s.amp[i | bp]) * s.amp[i | bq];
        acc += (std::popcount(i & between) & 1) ? -term : term;
    });
    return 2.0 * acc.real();
}

inline std::vector<double> probabilities(const StateVector &s) {
    std::vector<double> p(s.dim(), 0.0);
    s.for_each_index([&](std::uint64_t k) { p[k] = std::norm(s.amp[k]); });
    return p;
}

/// Diagonal expectation <n_p n_q> (p == q gives <n_p>) from probabilities.
inline double occupation(const std::vector<double> &prob, int p, int q) {
    const std::uint64_t mask = (std::uint64_t{1} << p) | (std::uint64_t{1} << q);
    double acc = 0.0;
    for (std::uint64_t k = 0; k < prob.size(); ++k)
        if ((k & mask) == mask) acc += prob[k];
    return acc;
}

/// Term-resolved expectation values of an embedded Hamiltonian.
struct EnergyBreakdown {
    Eigen::MatrixXd one_rdm;       // sum over spins of <a_i^dag a_j + h.c.>/2 off-diagonal, <n_i> diagonal
    Eigen::VectorXd double_occ;    // <n_i,up n_i,down> on fragment orbitals
    double energy = 0.0;
};

inline EnergyBreakdown measure_terms(const EmbeddedHamiltonian &H, const StateVector &s, const QubitLayout &layout,
                                     double threshold = 0.0) {
    const int n = H.orbitals();
    EnergyBreakdown out;
    out.one_rdm = Eigen::MatrixXd::Zero(n, n);
    out.double_occ = Eigen::VectorXd::Zero(H.n_frag);
    std::vector<double> occ(2 * n, 0.0);
    std::vector<std::uint64_t> onsite_mask(H.n_frag);
    for (int i = 0; i < H.n_frag; ++i)
        onsite_mask[i] = (std::uint64_t{1} << layout.qubit(i, 0)) | (std::uint64_t{1} << layout.qubit(i, 1));
    s.for_each_index([&](std::uint64_t k) {
        const double w = std::norm(s.amp[k]);
        if (w == 0.0) return;
        for (std::uint64_t bits = k; bits; bits &= bits - 1) occ[std::countr_zero(bits)] += w;
        for (int i = 0; i < H.n_frag; ++i)
            if ((k & onsite_mask[i]) == onsite_mask[i]) out.double_occ(i) += w;
    });
    for (int i = 0; i < n; ++i)
        for (int spin = 0; spin < 2; ++spin) out.one_rdm(i, i) += occ[layout.qubit(i, spin)];
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(H.K(i, j)) <= threshold) continue;
            double v = 0.0;
            for (int spin = 0; spin < 2; ++spin) v += hopping_expectation(s, layout.qubit(i, spin), layout.qubit(j, spin));
            out.one_rdm(i, j) = out.one_rdm(j, i) = 0.5 * v;
        }
    Eigen::MatrixXd Q = H.quadratic();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        e += Q(i, i) * out.one_rdm(i, i);
        for (int j = i + 1; j < n; ++j) e += 2.0 * Q(i, j) * out.one_rdm(i, j);
    }
    e += H.U * out.double_occ.sum();
    out.energy = e;
    return out;
}

inline double expectation(const EmbeddedHamiltonian &H, const StateVector &s, const QubitLayout &layout) {
    return measure_terms(H, s, layout).energy;
}

/// Seeded generator for one stream of a master seed.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

/// Multinomial draw of outcome counts from a probability vector.
inline std::vector<std::uint64_t> sample_counts(const std::vector<double> &prob, std::uint64_t shots, std::mt19937_64 &rng) {
    std::vector<std::uint64_t> counts(prob.size(), 0);
    double rest = 0.0;
    for (double p : prob) rest += p;
    std::size_t last = 0;
    for (std::size_t k = 0; k < prob.size(); ++k)
        if (prob[k] > 0.0) last = k;
    std::uint64_t left = shots;
    for (std::size_t k = 0; k < prob.size() && left > 0; ++k) {
        if (prob[k] <= 0.0) continue;
        double q = rest > 0 ? std::min(1.0, prob[k] / rest) : 1.0;
        std::uint64_t c = (k == last || q >= 1.0) ? left : std::binomial_distribution<std::uint64_t>(left, q)(rng);
        counts[k] = c;
        left -= c;
        rest -= prob[k];
    }
    return counts;
}

inline std::vector<std::uint64_t> sample(const StateVector &s, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw SpecError("shots must be positive");
    auto rng = make_rng(seed);
    return sample_counts(probabilities(s), shots, rng);
}

}  // namespace dmetvqe

#endif  // DMETVQE_STATEVECTOR_HPP
