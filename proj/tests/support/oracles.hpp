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

// Independent reference implementations used by the tests. Nothing here calls
// the gate kernels, the sector machinery or the eigensolvers of the library.

#ifndef DMETVQE_TESTS_ORACLES_HPP
#define DMETVQE_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <tuple>
#include <vector>

#include "dmetvqe/ansatz.hpp"
#include "dmetvqe/embedding.hpp"

namespace oracle {

using cplx = std::complex<double>;

/// Dense Jordan-Wigner annihilator on qubit q of an n-qubit register. Bit q
/// set means occupied; the sign counts occupied qubits below q.
inline Eigen::MatrixXd annihilator(int n, int q) {
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
        if (!(k >> q & 1)) continue;
        int below = 0;
        for (int b = 0; b < q; ++b) below += (k >> b) & 1;
        a(k ^ (std::size_t{1} << q), k) = (below % 2) ? -1.0 : 1.0;
    }
    return a;
}

inline Eigen::MatrixXd number_op(int n, int q) {
    Eigen::MatrixXd a = annihilator(n, q);
    return a.transpose() * a;
}

/// a_p^dag a_q + a_q^dag a_p.
inline Eigen::MatrixXd hopping_op(int n, int p, int q) {
    Eigen::MatrixXd ap = annihilator(n, p), aq = annihilator(n, q);
    Eigen::MatrixXd h = ap.transpose() * aq;
    return h + h.transpose();
}

/// Dense Hubbard-type Hamiltonian sum_ij,s Q_ij a_is^dag a_js + U sum_{i<nU} n_iu n_id.
/// Orbital i, spin s sits on qubit i + s*n_orb.
inline Eigen::MatrixXd dense_hamiltonian(const Eigen::MatrixXd &Q, double U, int n_onsite) {
    const int n = static_cast<int>(Q.rows()), nq = 2 * n;
    const std::size_t dim = std::size_t{1} << nq;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<Eigen::MatrixXd> a;
    for (int q = 0; q < nq; ++q) a.push_back(annihilator(nq, q));
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (Q(i, j) != 0.0) H += Q(i, j) * a[i + s * n].transpose() * a[j + s * n];
    for (int i = 0; i < n_onsite; ++i) H += U * (a[i].transpose() * a[i]) * (a[i + n].transpose() * a[i + n]);
    return H;
}

/// Lowest eigenvalue of H restricted to basis states with the given spin counts.
inline double sector_ground_energy(const Eigen::MatrixXd &H, int n_orb, int n_up, int n_down) {
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < static_cast<std::size_t>(H.rows()); ++k) {
        int u = 0, d = 0;
        for (int b = 0; b < n_orb; ++b) u += (k >> b) & 1, d += (k >> (b + n_orb)) & 1;
        if (u == n_up && d == n_down) keep.push_back(k);
    }
    Eigen::MatrixXd S(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c) S(r, c) = H(keep[r], keep[c]);
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Ground energy of the two-site Hubbard model at half filling.
inline double dimer_energy(double t, double U) { return 0.5 * (U - std::sqrt(U * U + 16.0 * t * t)); }

/// Mean-field energy per site of a ring from the analytic dispersion. The
/// twist is pi for anti-periodic boundaries.
inline double ring_energy_per_site(int N, int N_occ, double t, bool anti_periodic) {
    std::vector<double> eps;
    const double twist = anti_periodic ? std::numbers::pi : 0.0;
    for (int m = 0; m < N; ++m) eps.push_back(-2.0 * t * std::cos((2.0 * std::numbers::pi * m + twist) / N));
    std::sort(eps.begin(), eps.end());
    double e = 0.0;
    for (int k = 0; k < N_occ / 2; ++k) e += 2.0 * eps[k];
    return e / N;
}

/// Mean-field energy per site of a 2D torus from the analytic dispersion.
inline double torus_energy_per_site(int Lx, int Ly, int N_occ, double t, bool anti_periodic) {
    std::vector<double> eps;
    const double twist = anti_periodic ? std::numbers::pi : 0.0;
    for (int mx = 0; mx < Lx; ++mx)
        for (int my = 0; my < Ly; ++my)
            eps.push_back(-2.0 * t * (std::cos((2.0 * std::numbers::pi * mx + twist) / Lx) +
                                      std::cos((2.0 * std::numbers::pi * my + twist) / Ly)));
    std::sort(eps.begin(), eps.end());
    double e = 0.0;
    for (int k = 0; k < N_occ / 2; ++k) e += 2.0 * eps[k];
    return e / (Lx * Ly);
}

/// Amplitude <k| of a Slater determinant with orbitals phi (rows = modes)
/// for one spin sector: det of the rows selected by the occupied modes.
inline double slater_amplitude(const Eigen::MatrixXd &phi, std::uint64_t occupied) {
    const int m = static_cast<int>(phi.cols());
    std::vector<int> rows;
    for (int b = 0; b < static_cast<int>(phi.rows()); ++b)
        if (occupied >> b & 1) rows.push_back(b);
    if (static_cast<int>(rows.size()) != m) return 0.0;
    Eigen::MatrixXd M(m, m);
    for (int r = 0; r < m; ++r) M.row(r) = phi.row(rows[r]);
    return m == 0 ? 1.0 : M.determinant();
}

/// Applies exp(i phi G) for real symmetric G, caching the eigenbasis.
class Exponentiator {
  public:
    void apply(const Eigen::MatrixXd &G, double phi, Eigen::VectorXcd &v, const std::tuple<int, int, int> &key) {
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G)).first;
        const auto &es = it->second;
        Eigen::VectorXcd w = es.eigenvectors().transpose().cast<cplx>() * v;
        for (Eigen::Index k = 0; k < w.size(); ++k) w(k) *= std::polar(1.0, phi * es.eigenvalues()(k));
        v = es.eigenvectors().cast<cplx>() * w;
    }

  private:
    std::map<std::tuple<int, int, int>, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> cache_;
};

/// Ansatz state as the ordered product of exact term exponentials, written
/// in the qubit basis of the schedule's initial layout. Per layer: onsite
/// terms, hopping terms in network order (reversed on odd layers), number terms.
inline Eigen::VectorXcd ansatz_state(const dmetvqe::NetworkSchedule &sched, const dmetvqe::ParamBinding &b, double U,
                                     int depth, const std::vector<double> &theta, Eigen::VectorXcd v) {
    const int n = static_cast<int>(sched.network.initial.size()), nq = 2 * n;
    const dmetvqe::QubitLayout lay = sched.initial_layout();
    auto q = [&](int orb, int spin) { return lay.position[orb] + spin * n; };
    Exponentiator ex;
    for (int d = 0; d < depth; ++d) {
        const int off = d * b.slots_per_layer;
        for (int i = 0; i < static_cast<int>(b.onsite.size()); ++i) {
            const double scale = b.variant == dmetvqe::Variant::HVMin ? U : b.onsite[i].scale;
            Eigen::MatrixXd G = number_op(nq, q(i, 0)) * number_op(nq, q(i, 1));
            ex.apply(G, scale * theta[off + b.onsite[i].slot], v, {0, i, 0});
        }
        const auto &layers = sched.network.layers;
        for (std::size_t k = 0; k < layers.size(); ++k) {
            const auto &layer = layers[d % 2 == 0 ? k : layers.size() - 1 - k];
            for (const auto &g : layer.gates) {
                if (!g.hop) continue;
                auto key = std::minmax(g.left, g.right);
                const auto ref = b.hopping.at(key);
                for (int s = 0; s < 2; ++s)
                    ex.apply(hopping_op(nq, q(key.first, s), q(key.second, s)), ref.scale * theta[off + ref.slot], v,
                             {1, key.first * 64 + key.second, s});
            }
        }
        for (int i = 0; i < static_cast<int>(b.number.size()); ++i) {
            const auto ref = b.number[i];
            if (ref.slot < 0) continue;
            for (int s = 0; s < 2; ++s) ex.apply(number_op(nq, q(i, s)), ref.scale * theta[off + ref.slot], v, {2, i, s});
        }
    }
    return v;
}

inline double infidelity(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
    return 1.0 - std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

inline Eigen::VectorXcd random_state(int n_qubits, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(std::size_t{1} << n_qubits);
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = cplx(g(rng), g(rng));
    return v / v.norm();
}

/// Rosenbrock function and its minimum at (1, ..., 1).
inline double rosenbrock(const std::vector<double> &x) {
    double f = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) f += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
    return f;
}

}  // namespace oracle

#endif  // DMETVQE_TESTS_ORACLES_HPP
