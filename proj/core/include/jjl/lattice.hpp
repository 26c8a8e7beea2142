// Copyright 2026 The JJL Workbench Authors
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

#pragma once

// Lattice side of the workbench: the quantum phase model on small closed
// ladders.  Charge-basis Hamiltonians for exact diagonalization, classical
// energy minimization, chirality measurements, and adiabatic flux ramps.
//
// Geometry and gauge: sites (a, j) with leg a in {0 = upper, 1 = lower} and
// rung j in [0, N).  Horizontal couplings E_x carry gauge phase +pi f on the
// upper leg and -pi f on the lower leg, rungs E_y carry none, so every
// plaquette encloses 2 pi f.  A hole flux Phi adds 2 pi Phi / N to every
// horizontal link along the ring orientation, threading the hole without
// touching the plaquette frustration.  The mobius_impurity seam crosses the
// legs between rungs N-1 and 0 with couplings scaled by impurity_strength.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace jjl {

enum class Seam { kPeriodic, kMobiusImpurity };

struct LadderSpec {
  int n_plaquettes = 3;
  double ex = 1.0;
  double ey = 1.0;
  double ec = 0.1;
  double frustration = 0.5;
  Seam seam = Seam::kMobiusImpurity;
  double impurity_strength = 1.0;
  int n_max = 2;
  double hole_flux = 0.0;

  int n_sites() const { return 2 * n_plaquettes; }
  void validate() const {
    if (n_plaquettes < 2) throw std::invalid_argument("LadderSpec: n_plaquettes >= 2");
    if (n_max < 1) throw std::invalid_argument("LadderSpec: n_max >= 1");
    if (ec < 0.0) throw std::invalid_argument("LadderSpec: ec >= 0");
  }
};

struct Link {
  int from = 0;
  int to = 0;
  double coupling = 0.0;
  double gauge = 0.0;  // A_{from->to}
};

// Directed plaquette boundary: (link index, orientation +-1).
struct Plaquette {
  std::array<std::pair<int, int>, 4> edges;
};

std::vector<Link> ladder_links(const LadderSpec& spec);
std::vector<Plaquette> ladder_plaquettes(const LadderSpec& spec);

struct ChargeBasis {
  int n_sites = 0;
  int n_max = 0;
  std::optional<int> n_tot;
  std::vector<std::uint64_t> states;
  std::unordered_map<std::uint64_t, int> index;

  static ChargeBasis build(int n_sites, int n_max, std::optional<int> n_tot);

  int dim() const { return static_cast<int>(states.size()); }
  int charge(std::uint64_t state, int site) const {
    return static_cast<int>((state >> (4 * site)) & 0xF) - n_max;
  }
  std::optional<std::uint64_t> shifted(std::uint64_t state, int site, int delta) const;
};

struct SparseOperator {
  Eigen::SparseMatrix<std::complex<double>> mat;

  int dim() const { return static_cast<int>(mat.rows()); }
  std::size_t nonzeros() const { return static_cast<std::size_t>(mat.nonZeros()); }
  bool is_hermitian(double tol = 0.0) const;
  double infinity_norm() const;
  Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(mat); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return mat * v; }
};

struct BuildOptions {
  std::size_t max_nonzeros = 2'000'000;
};

// Charging term plus one pair-hop term per link; conserves total charge.
SparseOperator build_from_links(std::span<const Link> links, double ec, const ChargeBasis& basis,
                                const BuildOptions& opts = {});
SparseOperator build_hamiltonian(const LadderSpec& spec, const ChargeBasis& basis,
                                 const BuildOptions& opts = {});

// Gauge-invariant link current E sin(phi_i - phi_j - A) as an operator.
SparseOperator link_current_operator(const Link& link, const ChargeBasis& basis);

// Sum over plaquettes of the directed circulation; the logical-state label.
SparseOperator chirality_sum_operator(const LadderSpec& spec, const ChargeBasis& basis);

// Diagonal gauge unitary mapping the hole_flux = 0 Hamiltonian onto the
// hole_flux = quanta one (integer quanta only).
Eigen::VectorXcd integer_flux_gauge(const LadderSpec& spec, const ChargeBasis& basis, int quanta);

// Half-unit flux map of the crossed-seam ladder.  The spectrum of the Mobius
// ladder is periodic under hole_flux -> hole_flux + 1/2; the connecting
// unitary is a one-plaquette ring translation composed with a diagonal
// gauge, and it carries each logical (chirality) state onto the other one.
// apply() maps a hole_flux = 1/2 frame vector back to the hole_flux = 0
// frame.  Throws std::invalid_argument for the periodic seam, where no such
// map exists.
struct FluxStepMap {
  std::vector<int> site_perm;
  Eigen::VectorXd lambda;  // per-site gauge angles

  Eigen::VectorXcd apply(const ChargeBasis& basis, const Eigen::VectorXcd& v) const;
};
FluxStepMap flux_step_unitary(const LadderSpec& spec);

struct ConvergenceError : std::runtime_error {
  double achieved;
  explicit ConvergenceError(double a)
      : std::runtime_error("eigensolver did not reach tolerance, residual " + std::to_string(a)),
        achieved(a) {}
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXcd vector;
  double residual = 0.0;
};

struct LanczosOptions {
  std::uint64_t seed = 7;
  double tol = 1e-8;  // ||Hv - lambda v|| < tol * ||H||
  int max_basis = 350;
};

// k lowest eigenpairs by Lanczos with full reorthogonalization.
std::vector<EigenPair> ground_spectrum(const SparseOperator& h, int k,
                                       const LanczosOptions& opts = {});

// exp(-i t H) v by Krylov projection with on-the-fly error control.
Eigen::VectorXcd expm_krylov(const SparseOperator& h, const Eigen::VectorXcd& v, double t,
                             double tol = 1e-10, int max_basis = 64);

struct PhaseConfiguration {
  Eigen::VectorXd phases;
  double energy = 0.0;
};

double classical_energy(const LadderSpec& spec, const Eigen::VectorXd& phases);

struct MinimizeOptions {
  int n_starts = 32;
  std::uint64_t seed = 1;
  double grad_tol = 1e-10;
  int max_descent_iters = 5000;
  int max_newton_iters = 80;
};

struct MinimizeResult {
  std::vector<PhaseConfiguration> minima;  // deduplicated, sorted by energy
  int dropped_starts = 0;
};

MinimizeResult classical_minimize(const LadderSpec& spec, const MinimizeOptions& opts = {});

struct ChiralityPattern {
  std::vector<int> chi;              // per-plaquette sign, 0 when below tolerance
  std::vector<double> circulation;   // raw directed circulation
  int sum = 0;
  bool alternating = false;          // nonzero and strictly alternating around the ring
};

ChiralityPattern chirality_classical(const LadderSpec& spec, const PhaseConfiguration& config,
                                     double tol_fraction = 1e-6);
ChiralityPattern chirality_quantum(const LadderSpec& spec, const ChargeBasis& basis,
                                   const Eigen::VectorXcd& state, double tol_fraction = 1e-6);

struct RampOptions {
  // Flux span of the ramp: 0.5 is the elementary flip quantum of the crossed
  // (Mobius) ladder -- the half flux quantum the twisted sector
  // fractionalizes to; 1.0 is a full gauge period (identity on the qubit).
  double flux_span = 0.5;
  int steps = 256;
  double krylov_tol = 1e-10;
  int gap_checks = 9;
  double gap_floor = 1e-3;
  int max_halvings = 4;
  double halving_tol = 1e-4;
  std::uint64_t seed = 7;
};

struct RampResult {
  Eigen::VectorXcd final_state;
  double fidelity_flip = 0.0;     // overlap^2 with the end-frame other logical state
  double fidelity_stay = 0.0;     // overlap^2 with the end-frame initial logical state
  double fidelity_initial = 0.0;  // overlap^2 with the unevolved initial state
  double min_gap = 0.0;           // min over checkpoints of E3 - E2
  bool adiabaticity_warning = false;
  bool halving_converged = true;
  int steps_used = 0;
};

// Ramp the hole flux from 0 over flux_span with a smooth cosine schedule;
// the final state is compared against the logical basis carried to the end
// frame (translation-gauge map for the half-unit step, diagonal gauge for
// integer spans).
RampResult adiabatic_ramp(const LadderSpec& spec, const ChargeBasis& basis, double total_time,
                          const Eigen::VectorXcd& initial, const Eigen::VectorXcd& logical0,
                          const Eigen::VectorXcd& logical1, const RampOptions& opts = {});

struct KinkResult {
  PhaseConfiguration config;
  ChiralityPattern pattern;
  bool stable = false;  // false: relaxation fell back to a ground pattern
};

// Exchange the chirality of plaquettes p and p+1 and locally relax.
KinkResult double_kink(const LadderSpec& spec, const PhaseConfiguration& base, int p,
                       const MinimizeOptions& opts = {});

// Binary eigenvector layout: magic "JJLV1", dimension u64, count u32, then
// complex doubles vector after vector, little endian.
void write_eigenvectors(const std::string& path, const std::vector<Eigen::VectorXcd>& vecs);
std::vector<Eigen::VectorXcd> read_eigenvectors(const std::string& path);

}  // namespace jjl
