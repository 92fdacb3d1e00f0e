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

#ifndef DMETVQE_MODEL_HPP
#define DMETVQE_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace dmetvqe {

enum class Boundary { Periodic, AntiPeriodic };

inline const char *to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "anti-periodic"; }

inline Boundary parse_boundary(const std::string &s) {
    if (s == "periodic") return Boundary::Periodic;
    if (s == "anti-periodic" || s == "antiperiodic") return Boundary::AntiPeriodic;
    throw SpecError("unknown boundary condition '" + s + "'");
}

/// Hubbard lattice. Sites are indexed row-major over (x, y): index = x * Ly + y.
struct HubbardSpec {
    int dimension = 1;
    int Lx = 2;
    int Ly = 1;
    double t = 1.0;
    double U = 0.0;
    Boundary boundary_x = Boundary::AntiPeriodic;
    Boundary boundary_y = Boundary::AntiPeriodic;
    int N_occ = 2;

    int num_sites() const { return Lx * Ly; }

    void validate() const {
        if (dimension != 1 && dimension != 2) throw SpecError("dimension must be 1 or 2");
        if (Lx < 2) throw SpecError("Lx must be at least 2");
        if (dimension == 1 && Ly != 1) throw SpecError("Ly must be 1 for a 1D lattice");
        if (dimension == 2 && Ly < 2) throw SpecError("Ly must be at least 2 for a 2D lattice");
        if (N_occ <= 0 || N_occ > 2 * num_sites() || N_occ % 2 != 0)
            throw SpecError("N_occ must be even and in (0, 2N]");
    }

    static HubbardSpec chain(int N, double t, double U, Boundary b, int N_occ) {
        HubbardSpec s;
        s.dimension = 1;
        s.Lx = N;
        s.Ly = 1;
        s.t = t;
        s.U = U;
        s.boundary_x = s.boundary_y = b;
        s.N_occ = N_occ;
        return s;
    }

    static HubbardSpec square(int Lx, int Ly, double t, double U, Boundary b, int N_occ) {
        HubbardSpec s;
        s.dimension = 2;
        s.Lx = Lx;
        s.Ly = Ly;
        s.t = t;
        s.U = U;
        s.boundary_x = s.boundary_y = b;
        s.N_occ = N_occ;
        return s;
    }
};

/// Electron count for a filling n_bar, rounded and forced even.
inline int occupation_from_filling(double n_bar, int num_sites) {
    int n = static_cast<int>(std::lround(n_bar * num_sites));
    if (n % 2 != 0) {
        double up = std::abs(n + 1 - n_bar * num_sites), down = std::abs(n - 1 - n_bar * num_sites);
        n = (down <= up && n > 1) ? n - 1 : n + 1;
    }
    return n;
}

/// Rectangular fragment anchored at the lattice origin. A fragment in a 1D
/// lattice has Nx = N_frag, Ny = 1. A 1D fragment in a 2D lattice has Nx = 1.
struct FragmentSpec {
    int Nx = 1;
    int Ny = 1;

    int size() const { return Nx * Ny; }

    static FragmentSpec line(int n) { return FragmentSpec{n, 1}; }
    static FragmentSpec rect(int nx, int ny) { return FragmentSpec{nx, ny}; }
};

enum class Geometry { Chain1D, Line2D, Rect2D };

inline const char *to_string(Geometry g) {
    switch (g) {
        case Geometry::Chain1D: return "1d/1d";
        case Geometry::Line2D: return "2d/1d";
        default: return "2d/2d";
    }
}

inline Geometry geometry_of(const HubbardSpec &spec, const FragmentSpec &frag) {
    if (spec.dimension == 1) return Geometry::Chain1D;
    if (frag.Nx == 1 || frag.Ny == 1) return Geometry::Line2D;
    return Geometry::Rect2D;
}

inline void validate(const HubbardSpec &spec, const FragmentSpec &frag) {
    spec.validate();
    if (frag.Nx < 1 || frag.Ny < 1) throw SpecError("fragment extents must be positive");
    if (spec.dimension == 1) {
        if (frag.Ny != 1) throw SpecError("a fragment in a 1D lattice must have Ny = 1");
        if (frag.Nx > spec.Lx) throw SpecError("fragment longer than the lattice");
    } else {
        if (frag.Nx > frag.Ny) throw SpecError("2D fragments require Nx <= Ny");
        if (frag.Nx > spec.Lx || frag.Ny > spec.Ly) throw SpecError("fragment exceeds the lattice");
    }
    if (2 * frag.size() > spec.num_sites()) throw SpecError("fragment larger than half the lattice");
}

/// Global site indices of the fragment, in fragment-local order (x major).
inline std::vector<int> fragment_sites(const HubbardSpec &spec, const FragmentSpec &frag) {
    std::vector<int> out;
    if (spec.dimension == 1) {
        for (int i = 0; i < frag.Nx; ++i) out.push_back(i);
        return out;
    }
    for (int x = 0; x < frag.Nx; ++x)
        for (int y = 0; y < frag.Ny; ++y) out.push_back(x * spec.Ly + y);
    return out;
}

/// Fragment-local indices of the sites sharing a bond with the environment.
inline std::vector<int> edge_sites(const HubbardSpec &spec, const FragmentSpec &frag) {
    std::vector<int> out;
    int n = frag.size();
    if (spec.dimension == 1) {
        out.push_back(0);
        if (n > 1) out.push_back(n - 1);
        return out;
    }
    if (frag.Nx == 1 || frag.Ny == 1) {
        for (int i = 0; i < n; ++i) out.push_back(i);
        return out;
    }
    for (int x = 0; x < frag.Nx; ++x)
        for (int y = 0; y < frag.Ny; ++y)
            if (x == 0 || y == 0 || x == frag.Nx - 1 || y == frag.Ny - 1) out.push_back(x * frag.Ny + y);
    return out;
}

inline int edge_count(const HubbardSpec &spec, const FragmentSpec &frag) {
    return static_cast<int>(edge_sites(spec, frag).size());
}

inline Eigen::MatrixXd ring_hopping(int n, double t, Boundary b) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        T(i, i + 1) -= t;
        T(i + 1, i) -= t;
    }
    double wrap = b == Boundary::Periodic ? -t : t;
    T(n - 1, 0) += wrap;
    T(0, n - 1) += wrap;
    return T;
}

inline Eigen::MatrixXd build_hopping_matrix(const HubbardSpec &spec) {
    spec.validate();
    if (spec.dimension == 1) return ring_hopping(spec.Lx, spec.t, spec.boundary_x);
    Eigen::MatrixXd Tx = ring_hopping(spec.Lx, spec.t, spec.boundary_x);
    Eigen::MatrixXd Ty = ring_hopping(spec.Ly, spec.t, spec.boundary_y);
    int n = spec.num_sites();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < spec.Lx; ++x)
        for (int y = 0; y < spec.Ly; ++y) {
            int i = x * spec.Ly + y;
            for (int x2 = 0; x2 < spec.Lx; ++x2) T(i, x2 * spec.Ly + y) += Tx(x, x2);
            for (int y2 = 0; y2 < spec.Ly; ++y2) T(i, x * spec.Ly + y2) += Ty(y, y2);
        }
    return T;
}

}  // namespace dmetvqe

#endif  // DMETVQE_MODEL_HPP
