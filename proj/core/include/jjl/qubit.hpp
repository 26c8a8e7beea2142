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

// The effective two-level description of the ladder doublet: fitting
// (epsilon, Delta) from exact-diagonalization data, exact 2x2 evolution,
// the flux-insertion NOT, and the coupled-register Hamiltonian
//   H = sum_j eps_j sz_j + sum_j Delta_j sx_j + sum_<kj> Lambda_kj sz_k sz_j.
//
// Sign conventions: the single-qubit form is H_eff = (eps sz - Delta sx)/2
// with Delta >= 0 absorbed into the basis phase; the register form carries
// no 1/2 and +Delta sx.  The K = 1 cross-walk between the two is tested
// explicitly rather than silently normalized.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "jjl/lattice.hpp"

namespace jjl {

struct EffectiveParams {
  double epsilon = 0.0;
  double delta = 0.0;  // >= 0 by phase convention
};

struct QubitState {
  std::complex<double> alpha{1.0, 0.0};
  std::complex<double> beta{0.0, 0.0};

  double norm() const { return std::sqrt(std::norm(alpha) + std::norm(beta)); }
  void check_normalized(double tol = 1e-12) const {
    if (std::abs(norm() - 1.0) > tol)
      throw std::invalid_argument("QubitState: |alpha|^2 + |beta|^2 must be 1");
  }
};

struct TwoLevelRejection : std::runtime_error {
  double ratio;
  explicit TwoLevelRejection(double r)
      : std::runtime_error("doublet not separated from the third level, ratio " +
                           std::to_string(r)),
        ratio(r) {}
};

struct DoubletInput {
  double e1 = 0.0;
  double e2 = 0.0;
  std::optional<double> e3;  // enables the two-level separation check
  Eigen::VectorXcd v1;
  Eigen::VectorXcd v2;
};

struct FitResult {
  EffectiveParams params;
  Eigen::VectorXcd logical0;  // chirality sum ~ -1 branch
  Eigen::VectorXcd logical1;
  Eigen::Matrix2cd rotation;  // columns express logical states in (v1, v2)
  double doublet_ratio = 0.0;  // (e2 - e1) / (e3 - e1) when e3 given
};

// Chooses the logical basis by diagonalizing the chirality-sum observable
// restricted to the doublet span, then reads off (epsilon, Delta) from the
// restricted Hamiltonian.  Throws TwoLevelRejection if ratio > 0.5.
FitResult fit_effective(const DoubletInput& doublet, const SparseOperator& chirality_sum);

// Exact evolution under H_eff = (eps sz - Delta sx)/2 for time t.
QubitState evolve(const EffectiveParams& params, const QubitState& psi0, double t);

QubitState not_gate(const QubitState& psi);

// Rebuild the 2x2 matrix (for round-trip checks).
Eigen::Matrix2cd effective_hamiltonian(const EffectiveParams& params);

struct RegisterSpec {
  int n_qubits = 1;
  std::vector<double> epsilon;  // size K
  std::vector<double> delta;    // size K
  struct Coupling {
    int k, j;
    double lambda;
  };
  std::vector<Coupling> couplings;

  void validate() const;
};

Eigen::MatrixXcd register_hamiltonian(const RegisterSpec& spec);
Eigen::VectorXcd register_evolve(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi, double t);

// Entanglement entropy of qubit k in a register state (base-2 logs).
double entanglement_entropy(const Eigen::VectorXcd& psi, int n_qubits, int k);

}  // namespace jjl
