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

#ifndef DMETVQE_EMBEDDING_HPP
#define DMETVQE_EMBEDDING_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "meanfield.hpp"
#include "model.hpp"

namespace dmetvqe {

constexpr double kStructureThreshold = 1e-10;

struct Projector {
    Eigen::MatrixXd P;  // N x 2 N_frag, columns: fragment sites, then bath orbitals
    Eigen::MatrixXd V;  // N_env x N_frag
    Eigen::VectorXd bath_occupations;  // fractional eigenvalues of rho_E, ascending
    std::vector<int> fragment_sites;
    std::vector<int> environment_sites;
    int m_occupied = 0;  // environment orbitals with eigenvalue 1
    int N_emb = 0;
    double eps_used = 0.0;
};

/// Flips each column so its first component of magnitude above tol is positive.
inline void fix_column_signs(Eigen::MatrixXd &V, double tol = 1e-12) {
    for (int c = 0; c < V.cols(); ++c)
        for (int r = 0; r < V.rows(); ++r)
            if (std::abs(V(r, c)) > tol) {
                if (V(r, c) < 0) V.col(c) *= -1.0;
                break;
            }
}

inline Projector build_projector(const Eigen::MatrixXd &rho, const std::vector<int> &frag_sites, int N_occ) {
    const int N = static_cast<int>(rho.rows());
    const int nf = static_cast<int>(frag_sites.size());
    std::vector<char> in_frag(N, 0);
    for (int s : frag_sites) in_frag[s] = 1;
    Projector p;
    p.fragment_sites = frag_sites;
    for (int i = 0; i < N; ++i)
        if (!in_frag[i]) p.environment_sites.push_back(i);
    const int ne = static_cast<int>(p.environment_sites.size());

    Eigen::MatrixXd rhoE(ne, ne);
    for (int a = 0; a < ne; ++a)
        for (int b = 0; b < ne; ++b) rhoE(a, b) = rho(p.environment_sites[a], p.environment_sites[b]);
    // rho_E is positive semidefinite, so an SVD is a valid fallback when the
    // tridiagonal QR iteration stalls on heavily degenerate spectra.
    Eigen::VectorXd w;
    Eigen::MatrixXd vecs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rhoE);
    if (es.info() == Eigen::Success) {
        w = es.eigenvalues();
        vecs = es.eigenvectors();
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(rhoE, Eigen::ComputeThinU);
        if (svd.info() != Eigen::Success) throw EigenSolverFailure("environment density eigensolver did not converge");
        w = svd.singularValues().reverse();
        vecs = svd.matrixU().rowwise().reverse();
    }

    // Widen the 0/1 band while too many values look fractional, narrow it
    // while too few do.
    std::vector<int> frac;
    int ones = 0;
    double eps = 0.0;
    for (double band : {1e-7, 1e-6, 1e-5, 1e-4, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12}) {
        eps = band;
        frac.clear();
        ones = 0;
        for (int k = 0; k < ne; ++k) {
            if (w(k) > 1.0 - eps) ++ones;
            else if (w(k) >= eps) frac.push_back(k);
        }
        if (static_cast<int>(frac.size()) == nf) break;
        if (band == 1e-4 && static_cast<int>(frac.size()) > nf) break;
    }
    if (static_cast<int>(frac.size()) != nf)
        throw FractionalCountMismatch("found " + std::to_string(frac.size()) + " fractional environment eigenvalues, expected " +
                                      std::to_string(nf));
    p.eps_used = eps;
    p.m_occupied = ones;
    p.N_emb = N_occ - 2 * ones;
    p.V.resize(ne, nf);
    p.bath_occupations.resize(nf);
    for (int b = 0; b < nf; ++b) {
        p.V.col(b) = vecs.col(frac[b]);
        p.bath_occupations(b) = w(frac[b]);
    }
    fix_column_signs(p.V);
    p.P = Eigen::MatrixXd::Zero(N, 2 * nf);
    for (int k = 0; k < nf; ++k) p.P(frag_sites[k], k) = 1.0;
    for (int a = 0; a < ne; ++a) p.P.row(p.environment_sites[a]).tail(nf) = p.V.row(a);
    return p;
}

inline Eigen::MatrixXd project_hopping(const Eigen::MatrixXd &T, const Projector &p) {
    Eigen::MatrixXd K = p.P.transpose() * T * p.P;
    return 0.5 * (K + K.transpose());
}

/// One spin sector's embedded orbitals: fragment 0..n-1, bath n..2n-1.
struct EmbeddedHamiltonian {
    Eigen::MatrixXd K;  // 2n x 2n hopping coefficients
    double U = 0.0;
    double mu = 0.0;
    int n_frag = 0;
    int N_emb = 0;

    int orbitals() const { return 2 * n_frag; }
    int qubits() const { return 4 * n_frag; }
    int n_up() const { return N_emb / 2; }
    int n_down() const { return N_emb / 2; }

    /// Quadratic part including the -mu fragment terms.
    Eigen::MatrixXd quadratic() const {
        Eigen::MatrixXd Q = K;
        for (int i = 0; i < n_frag; ++i) Q(i, i) -= mu;
        return Q;
    }
};

inline EmbeddedHamiltonian assemble(const Eigen::MatrixXd &K_emb, double U, int N_emb, double mu) {
    EmbeddedHamiltonian h;
    h.K = K_emb;
    h.U = U;
    h.mu = mu;
    h.n_frag = static_cast<int>(K_emb.rows()) / 2;
    h.N_emb = N_emb;
    return h;
}

struct HoppingTerm {
    int i, j;  // i < j, embedded orbital indices
    double t;
};

struct NumberTerm {
    int i;
    double t;
};

struct TermStructure {
    int n_frag = 0;
    std::vector<HoppingTerm> frag_frag, frag_bath, bath_bath;
    std::vector<NumberTerm> bath_number, frag_number;
    std::vector<std::vector<int>> bath_groups;  // sorted by size desc, then lowest orbital
    std::vector<int> edge_orbitals;             // fragment orbitals with bath couplings

    std::vector<HoppingTerm> hopping() const {
        std::vector<HoppingTerm> all = frag_frag;
        all.insert(all.end(), frag_bath.begin(), frag_bath.end());
        all.insert(all.end(), bath_bath.begin(), bath_bath.end());
        return all;
    }
};

inline std::vector<std::vector<int>> sort_groups(std::vector<std::vector<int>> groups) {
    for (auto &g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(), [](const auto &a, const auto &b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();
    });
    return groups;
}

inline TermStructure analyze_structure(const Eigen::MatrixXd &K, double threshold = kStructureThreshold) {
    if (!(threshold > 0)) throw SpecError("structure threshold must be positive");
    TermStructure s;
    const int n = static_cast<int>(K.rows()) / 2;
    s.n_frag = n;
    std::vector<int> parent(2 * n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<char> edge(n, 0);
    for (int i = 0; i < 2 * n; ++i) {
        if (std::abs(K(i, i)) > threshold) (i < n ? s.frag_number : s.bath_number).push_back({i, K(i, i)});
        for (int j = i + 1; j < 2 * n; ++j) {
            double t = K(i, j);
            if (std::abs(t) <= threshold) continue;
            if (j < n) {
                s.frag_frag.push_back({i, j, t});
            } else if (i < n) {
                s.frag_bath.push_back({i, j, t});
                edge[i] = 1;
            } else {
                s.bath_bath.push_back({i, j, t});
                parent[find(i)] = find(j);
            }
        }
    }
    for (int i = 0; i < n; ++i)
        if (edge[i]) s.edge_orbitals.push_back(i);
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(2 * n, -1);
    for (int b = n; b < 2 * n; ++b) {
        int r = find(b);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(b);
    }
    s.bath_groups = sort_groups(groups);
    return s;
}

/// Largest |K_ij| between bath orbitals of different groups of a given partition.
inline double cross_group_coupling(const Eigen::MatrixXd &K, const std::vector<std::vector<int>> &groups) {
    const int nb = static_cast<int>(K.rows());
    std::vector<int> label(nb, -1);
    for (size_t g = 0; g < groups.size(); ++g)
        for (int b : groups[g]) label[b] = static_cast<int>(g);
    double worst = 0.0;
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            if (label[i] >= 0 && label[j] >= 0 && label[i] != label[j]) worst = std::max(worst, std::abs(K(i, j)));
    return worst;
}

/// Steps 1 and 2 of single-shot embedding plus the projected hopping matrix.
struct Embedding {
    HubbardSpec spec;
    FragmentSpec frag;
    Eigen::MatrixXd T;
    SlaterMatrix meanfield;
    Eigen::MatrixXd rho;
    Projector projector;
    Eigen::MatrixXd K_emb;

    EmbeddedHamiltonian hamiltonian(double mu) const { return assemble(K_emb, spec.U, projector.N_emb, mu); }
};

inline Embedding embed(const HubbardSpec &spec, const FragmentSpec &frag) {
    validate(spec, frag);
    Embedding e;
    e.spec = spec;
    e.frag = frag;
    e.T = build_hopping_matrix(spec);
    e.meanfield = lowest_eigenvectors(e.T, spec.N_occ / 2);
    e.rho = one_rdm(e.meanfield.phi);
    e.projector = build_projector(e.rho, fragment_sites(spec, frag), spec.N_occ);
    e.K_emb = project_hopping(e.T, e.projector);
    return e;
}

}  // namespace dmetvqe

#endif  // DMETVQE_EMBEDDING_HPP
