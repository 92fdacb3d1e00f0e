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

#ifndef DMETVQE_MEANFIELD_HPP
#define DMETVQE_MEANFIELD_HPP

#include <Eigen/Dense>
#include <cmath>

#include "errors.hpp"

namespace dmetvqe {

constexpr double kDegeneracyTol = 1e-9;

struct SlaterMatrix {
    Eigen::MatrixXd phi;          // N x M, orthonormal columns
    Eigen::VectorXd eigenvalues;  // all N eigenvalues, ascending
    bool fermi_degenerate = false;
    double fermi_gap = 0.0;       // lambda_{M+1} - lambda_M, or +inf when M == N
};

inline SlaterMatrix lowest_eigenvectors(const Eigen::MatrixXd &T, int M) {
    if (M < 1 || M > T.rows()) throw SpecError("orbital count out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success) throw EigenSolverFailure("mean-field eigensolver did not converge");
    SlaterMatrix out;
    out.eigenvalues = es.eigenvalues();
    out.phi = es.eigenvectors().leftCols(M);
    if (M < T.rows()) {
        out.fermi_gap = out.eigenvalues(M) - out.eigenvalues(M - 1);
        out.fermi_degenerate = out.fermi_gap < kDegeneracyTol;
    } else {
        out.fermi_gap = INFINITY;
    }
    return out;
}

/// rho_ij = <a_j^dag a_i> of the Slater determinant.
inline Eigen::MatrixXd one_rdm(const Eigen::MatrixXd &phi) {
    Eigen::MatrixXd rho = phi * phi.transpose();
    return 0.5 * (rho + rho.transpose());
}

/// Both spin sectors.
inline double meanfield_energy(const SlaterMatrix &s) {
    return 2.0 * s.eigenvalues.head(s.phi.cols()).sum();
}

}  // namespace dmetvqe

#endif  // DMETVQE_MEANFIELD_HPP
