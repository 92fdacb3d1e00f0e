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

#ifndef DMETVQE_DMET_HPP
#define DMETVQE_DMET_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "embedding.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace dmetvqe {

enum class SolverKind { ED, VQEExact, VQESampled };

inline const char *to_string(SolverKind k) {
    switch (k) {
        case SolverKind::ED: return "ed";
        case SolverKind::VQEExact: return "vqe-exact";
        default: return "vqe-sampled";
    }
}

inline SolverKind parse_solver(const std::string &s) {
    if (s == "ed") return SolverKind::ED;
    if (s == "vqe-exact") return SolverKind::VQEExact;
    if (s == "vqe-sampled") return SolverKind::VQESampled;
    throw SpecError("unknown solver '" + s + "'");
}

inline double default_mu_tolerance(SolverKind k) { return k == SolverKind::VQESampled ? 0.5 : 0.1; }

struct DMETConfig {
    SolverKind solver = SolverKind::ED;
    std::optional<double> tolerance;  // |f(mu)| bound; 0.1 exact, 0.5 sampled by default
    int max_iters = 30;
    double mu0 = 0.0;
    std::optional<double> mu1;  // U/2 by default
    VQEOptions vqe;
    bool warm_start = true;     // sampled mode only

    double tol() const { return tolerance ? *tolerance : default_mu_tolerance(solver); }
};

/// Secant iteration on f; stops when |f(mu)| < tol.
struct SecantStep {
    double mu = 0.0;
    double f = 0.0;
};

struct SecantResult {
    double mu = 0.0;
    double f = 0.0;
    int iterations = 0;  // function evaluations
    std::vector<SecantStep> trace;
};

inline SecantResult secant_find_mu(const std::function<double(double)> &f, double mu0, double mu1, double tol, int max_iters = 30) {
    if (mu0 == mu1) throw SpecError("secant needs two distinct starting points");
    if (!(tol > 0)) throw SpecError("secant tolerance must be positive");
    SecantResult out;
    auto best = [&] {
        const SecantStep *b = &out.trace.front();
        for (const SecantStep &s : out.trace)
            if (std::abs(s.f) < std::abs(b->f)) b = &s;
        return b->mu;
    };
    auto eval = [&](double mu) {
        double v = f(mu);
        out.trace.push_back({mu, v});
        ++out.iterations;
        return v;
    };
    double f0 = eval(mu0);
    if (std::abs(f0) < tol) return out.mu = mu0, out.f = f0, out;
    double f1 = eval(mu1);
    while (true) {
        if (std::abs(f1) < tol) return out.mu = mu1, out.f = f1, out;
        if (out.iterations >= max_iters) throw NonConvergence("secant did not reach tolerance", best());
        if (std::abs(f1 - f0) < 1e-12) throw DegenerateStep("secant step with flat function values", best());
        double mu2 = mu1 - f1 * (mu1 - mu0) / (f1 - f0);
        mu0 = mu1, f0 = f1;
        mu1 = mu2, f1 = eval(mu2);
    }
}

/// Fragment energy and double occupancy from a spin-summed 1-RDM and the
/// per-orbital double occupancies. Bath-only terms are excluded.
struct FragmentObservables {
    double energy = 0.0;
    double double_occ = 0.0;
    double energy_per_site = 0.0;
    double double_occ_per_site = 0.0;
};

inline FragmentObservables observables(const EmbeddedHamiltonian &H, const Eigen::MatrixXd &gamma, const Eigen::VectorXd &docc) {
    const int nf = H.n_frag, n = H.orbitals();
    FragmentObservables o;
    double t_frag = 0.0, t_fb = 0.0;
    for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nf; ++j) t_frag += H.K(i, j) * gamma(i, j);
        for (int b = nf; b < n; ++b) t_fb += 2.0 * H.K(i, b) * gamma(i, b);
    }
    const double w = H.U * docc.sum();
    o.energy = t_frag + 0.5 * t_fb + w;
    o.double_occ = docc.sum();
    o.energy_per_site = o.energy / nf;
    o.double_occ_per_site = o.double_occ / nf;
    return o;
}

inline double fragment_occupation(const Eigen::MatrixXd &gamma, int n_frag) {
    double acc = 0.0;
    for (int i = 0; i < n_frag; ++i) acc += gamma(i, i);
    return acc;
}

/// One solver call at a given mu.
struct SolverPoint {
    double mu = 0.0;
    double f = 0.0;
    double energy = 0.0;  // embedded ground energy
    Eigen::MatrixXd one_rdm;
    Eigen::VectorXd double_occ;
    long evaluations = 0;
    std::vector<double> theta;
    std::optional<double> fidelity;
};

struct DMETResult {
    double mu_star = 0.0;
    double energy_per_site = 0.0;
    double double_occ_per_site = 0.0;
    std::vector<SolverPoint> trace;
    long evaluations = 0;
    int secant_iterations = 0;
    std::optional<double> fidelity;
    int ansatz_depth = 0;          // two-qubit depth of the realized circuit, VQE only
    int measurement_rounds = 0;    // preparations per energy estimate, sampled only
    std::vector<std::string> warnings;
    double wall_time_s = 0.0;
};

/// Mean field -> projector -> secant loop over H_emb(mu) -> observables.
class DMETPipeline {
  public:
    DMETPipeline(const HubbardSpec &spec, const FragmentSpec &frag, DMETConfig cfg)
        : emb_(embed(spec, frag)), cfg_(std::move(cfg)) {
        structure_ = analyze_structure(emb_.K_emb);
        if (emb_.meanfield.fermi_degenerate) warnings_.push_back("degenerate Fermi level in the lattice mean field");
        if (cfg_.solver != SolverKind::ED) vqe_ = std::make_unique<VQESolver>(structure_, geometry_of(spec, frag), frag);
    }

    const Embedding &embedding() const { return emb_; }
    const TermStructure &structure() const { return structure_; }
    const VQESolver *vqe() const { return vqe_.get(); }

    SolverPoint solve(double mu, const std::vector<double> &warm = {}) const {
        EmbeddedHamiltonian H = emb_.hamiltonian(mu);
        SolverPoint p;
        p.mu = mu;
        if (cfg_.solver == SolverKind::ED) {
            EDResult ed = exact_diagonalize(H);
            EnergyBreakdown b = measure_terms(H, ed.state, QubitLayout::identity(H.orbitals()));
            p.energy = ed.energy;
            p.one_rdm = b.one_rdm;
            p.double_occ = b.double_occ;
        } else {
            VQEOptions o = cfg_.vqe;
            o.mode = cfg_.solver == SolverKind::VQEExact ? VQEMode::Exact : VQEMode::Sampled;
            VQEResult r = vqe_->solve(H, o, warm);
            p.energy = r.energy;
            p.one_rdm = r.one_rdm;
            p.double_occ = r.double_occ;
            p.evaluations = r.evaluations;
            p.theta = r.theta;
            p.fidelity = r.fidelity;
        }
        const double N = emb_.spec.num_sites();
        p.f = N / H.n_frag * fragment_occupation(p.one_rdm, H.n_frag) - emb_.spec.N_occ;
        return p;
    }

    DMETResult run() const {
        auto t0 = std::chrono::steady_clock::now();
        DMETResult out;
        out.warnings = warnings_;
        std::vector<double> warm;
        const bool reuse = cfg_.solver == SolverKind::VQESampled && cfg_.warm_start;
        auto f = [&](double mu) {
            SolverPoint p = solve(mu, reuse ? warm : std::vector<double>{});
            if (reuse) warm = p.theta;
            out.trace.push_back(p);
            out.evaluations += p.evaluations;
            return p.f;
        };
        const double mu1 = cfg_.mu1 ? *cfg_.mu1 : emb_.spec.U / 2.0;
        SecantResult s = secant_find_mu(f, cfg_.mu0, mu1 == cfg_.mu0 ? cfg_.mu0 + 1.0 : mu1, cfg_.tol(), cfg_.max_iters);
        out.mu_star = s.mu;
        out.secant_iterations = s.iterations;
        const SolverPoint &last = out.trace.back();
        EmbeddedHamiltonian H = emb_.hamiltonian(s.mu);
        FragmentObservables o = observables(H, last.one_rdm, last.double_occ);
        out.energy_per_site = o.energy_per_site;
        out.double_occ_per_site = o.double_occ_per_site;
        out.fidelity = last.fidelity;
        if (vqe_) {
            out.ansatz_depth = vqe_->circuit(H, cfg_.vqe.variant, cfg_.vqe.depth).two_qubit_depth;
            if (cfg_.solver == SolverKind::VQESampled) out.measurement_rounds = vqe_->plan().preparations();
        }
        out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

  private:
    Embedding emb_;
    DMETConfig cfg_;
    TermStructure structure_;
    std::unique_ptr<VQESolver> vqe_;
    std::vector<std::string> warnings_;
};

inline DMETResult single_shot_run(const HubbardSpec &spec, const FragmentSpec &frag, const DMETConfig &cfg) {
    return DMETPipeline(spec, frag, cfg).run();
}

}  // namespace dmetvqe

#endif  // DMETVQE_DMET_HPP
