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

#include "jjl/qubit.hpp"

#include <cmath>

namespace jjl {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

FitResult fit_effective(const DoubletInput& doublet, const SparseOperator& chirality_sum) {
  FitResult out;
  if (doublet.e3) {
    out.doublet_ratio = (doublet.e2 - doublet.e1) / (*doublet.e3 - doublet.e1);
    if (out.doublet_ratio > 0.5) throw TwoLevelRejection(out.doublet_ratio);
  }
  // Orthonormalize the doublet span (eigenvectors may carry solver noise).
  Eigen::VectorXcd v1 = doublet.v1.normalized();
  Eigen::VectorXcd v2 = doublet.v2;
  v2 -= v1.dot(v2) * v1;
  v2.normalize();

  Eigen::Matrix2cd x;
  x(0, 0) = v1.dot(chirality_sum.apply(v1));
  x(0, 1) = v1.dot(chirality_sum.apply(v2));
  x(1, 0) = std::conj(x(0, 1));
  x(1, 1) = v2.dot(chirality_sum.apply(v2));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(x);

  // Ascending eigenvalues: the most negative chirality sum is |0>.
  Eigen::Matrix2cd r = es.eigenvectors();
  Eigen::VectorXcd logical0 = r(0, 0) * v1 + r(1, 0) * v2;
  Eigen::VectorXcd logical1 = r(0, 1) * v1 + r(1, 1) * v2;

  // H restricted to the doublet span in the logical basis.
  auto h_elem = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    // v1, v2 are eigenvectors, so H acts diagonally on the span.
    std::complex<double> c1a = v1.dot(a), c2a = v2.dot(a);
    std::complex<double> c1b = v1.dot(b), c2b = v2.dot(b);
    return std::conj(c1a) * c1b * doublet.e1 + std::conj(c2a) * c2b * doublet.e2;
  };
  std::complex<double> h00 = h_elem(logical0, logical0);
  std::complex<double> h11 = h_elem(logical1, logical1);
  std::complex<double> h01 = h_elem(logical0, logical1);

  out.params.epsilon = std::real(h00 - h11);
  out.params.delta = 2.0 * std::abs(h01);
  // Phase convention: rotate |1> so the off-diagonal equals -Delta/2, then
  // make the largest component of |0> real positive.
  if (std::abs(h01) > 0.0) {
    std::complex<double> ph = -h01 / std::abs(h01);
    logical1 *= ph;
    r.col(1) *= ph;
  }
  int imax = 0;
  for (int i = 1; i < logical0.size(); ++i)
    if (std::abs(logical0[i]) > std::abs(logical0[imax])) imax = i;
  if (std::abs(logical0[imax]) > 0.0) {
    std::complex<double> ph = std::abs(logical0[imax]) / logical0[imax];
    logical0 *= ph;
    r.col(0) *= ph;
  }
  out.logical0 = std::move(logical0);
  out.logical1 = std::move(logical1);
  out.rotation = r;
  return out;
}

Eigen::Matrix2cd effective_hamiltonian(const EffectiveParams& p) {
  Eigen::Matrix2cd h;
  h << 0.5 * p.epsilon, -0.5 * p.delta, -0.5 * p.delta, -0.5 * p.epsilon;
  return h;
}

QubitState evolve(const EffectiveParams& p, const QubitState& psi0, double t) {
  psi0.check_normalized();
  const double omega = std::hypot(p.epsilon, p.delta);
  QubitState out = psi0;
  if (omega == 0.0) return out;
  // U = cos(w t/2) I - i sin(w t/2) (n . sigma), n = (-Delta, 0, eps)/w.
  const double c = std::cos(0.5 * omega * t);
  const double s = std::sin(0.5 * omega * t);
  const double nx = -p.delta / omega;
  const double nz = p.epsilon / omega;
  std::complex<double> u00 = c - kI * s * nz;
  std::complex<double> u01 = -kI * s * nx;
  std::complex<double> u11 = c + kI * s * nz;
  out.alpha = u00 * psi0.alpha + u01 * psi0.beta;
  out.beta = u01 * psi0.alpha + u11 * psi0.beta;
  return out;
}

QubitState not_gate(const QubitState& psi) {
  psi.check_normalized();
  return {psi.beta, psi.alpha};
}

void RegisterSpec::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("RegisterSpec: K >= 1");
  if (n_qubits > 12) throw std::invalid_argument("RegisterSpec: dense cap is K <= 12");
  if (static_cast<int>(epsilon.size()) != n_qubits ||
      static_cast<int>(delta.size()) != n_qubits)
    throw std::invalid_argument("RegisterSpec: need epsilon_j, delta_j per qubit");
  for (const auto& c : couplings)
    if (c.k < 0 || c.k >= n_qubits || c.j < 0 || c.j >= n_qubits || c.k == c.j)
      throw std::invalid_argument("RegisterSpec: coupling indices out of range");
}

namespace {

// sigma acting on qubit k of a 2^K register, little-endian bit order.
void add_single(Eigen::MatrixXcd& h, int n_qubits, int k, char axis, double coeff) {
  const int dim = 1 << n_qubits;
  for (int s = 0; s < dim; ++s) {
    int bit = (s >> k) & 1;
    switch (axis) {
      case 'z': h(s, s) += coeff * (bit == 0 ? 1.0 : -1.0); break;
      case 'x': h(s ^ (1 << k), s) += coeff; break;
      default: break;
    }
  }
}

}  // namespace

Eigen::MatrixXcd register_hamiltonian(const RegisterSpec& spec) {
  spec.validate();
  const int dim = 1 << spec.n_qubits;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < spec.n_qubits; ++k) {
    add_single(h, spec.n_qubits, k, 'z', spec.epsilon[k]);
    add_single(h, spec.n_qubits, k, 'x', spec.delta[k]);
  }
  for (const auto& c : spec.couplings) {
    for (int s = 0; s < dim; ++s) {
      double zk = ((s >> c.k) & 1) == 0 ? 1.0 : -1.0;
      double zj = ((s >> c.j) & 1) == 0 ? 1.0 : -1.0;
      h(s, s) += c.lambda * zk * zj;
    }
  }
  return h;
}

Eigen::VectorXcd register_evolve(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi,
                                 double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    phases[i] = std::exp(-kI * t * es.eigenvalues()(i));
  return es.eigenvectors() * (phases.array() * (es.eigenvectors().adjoint() * psi).array()).matrix();
}

double entanglement_entropy(const Eigen::VectorXcd& psi, int n_qubits, int k) {
  const int dim = 1 << n_qubits;
  if (psi.size() != dim) throw std::invalid_argument("entanglement_entropy: size mismatch");
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int rest = 0; rest < dim / 2; ++rest) {
        int lo = rest & ((1 << k) - 1);
        int hi = rest >> k;
        int sa = lo | (a << k) | (hi << (k + 1));
        int sb = lo | (b << k) | (hi << (k + 1));
        rho(a, b) += psi[sa] * std::conj(psi[sb]);
      }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

}  // namespace jjl
