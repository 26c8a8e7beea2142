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

#include <doctest.h>

#include "jjl/qubit.hpp"

using jjl::EffectiveParams;
using jjl::QubitState;
using jjl::RegisterSpec;

namespace {

Eigen::Matrix2cd sigma_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd sigma_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("half Rabi period swaps populations at zero bias") {
  EffectiveParams p{0.0, 0.4};
  QubitState zero{1.0, 0.0};
  auto flipped = jjl::evolve(p, zero, M_PI / p.delta);
  CHECK(std::norm(flipped.beta) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::norm(flipped.alpha) < 1e-12);
}

TEST_CASE("pure bias precesses the relative phase") {
  EffectiveParams p{0.8, 0.0};
  QubitState psi{std::sqrt(0.5), std::sqrt(0.5)};
  double t = 1.7;
  auto s = jjl::evolve(p, psi, t);
  CHECK(std::norm(s.alpha) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::norm(s.beta) == doctest::Approx(0.5).epsilon(1e-12));
  auto rel = (s.beta / s.alpha) / (psi.beta / psi.alpha);
  CHECK(std::arg(rel) == doctest::Approx(std::remainder(p.epsilon * t, 2.0 * M_PI)).epsilon(1e-10));
}

TEST_CASE("population beats at the generalized Rabi frequency") {
  EffectiveParams p{0.6, 0.45};
  const double omega = std::hypot(p.epsilon, p.delta);
  QubitState zero{1.0, 0.0};
  // p1(t) = (Delta/omega)^2 sin^2(omega t / 2): zero again at t = 2 pi/omega.
  auto back = jjl::evolve(p, zero, 2.0 * M_PI / omega);
  CHECK(std::norm(back.beta) < 1e-12);
  auto quarter = jjl::evolve(p, zero, M_PI / omega);
  CHECK(std::norm(quarter.beta) ==
        doctest::Approx(std::pow(p.delta / omega, 2)).epsilon(1e-10));
}

TEST_CASE("evolution is unitary on an orthonormal pair") {
  EffectiveParams p{0.3, 0.7};
  QubitState a{0.6, {0.0, 0.8}};
  QubitState b{{0.0, 0.8}, -0.6};  // orthogonal to a
  for (double t : {0.3, 1.1, 4.7}) {
    auto ea = jjl::evolve(p, a, t);
    auto eb = jjl::evolve(p, b, t);
    CHECK(std::abs(ea.norm() - 1.0) < 1e-12);
    CHECK(std::abs(eb.norm() - 1.0) < 1e-12);
    auto overlap = std::conj(ea.alpha) * eb.alpha + std::conj(ea.beta) * eb.beta;
    CHECK(std::abs(overlap) < 1e-12);
  }
}

TEST_CASE("NOT gate swaps amplitudes and is an involution") {
  QubitState zero{1.0, 0.0};
  auto one = jjl::not_gate(zero);
  CHECK(one.alpha == std::complex<double>{0.0, 0.0});
  CHECK(one.beta == std::complex<double>{1.0, 0.0});
  QubitState s{0.6, 0.8};
  auto twice = jjl::not_gate(jjl::not_gate(s));
  CHECK(twice.alpha == s.alpha);
  CHECK(twice.beta == s.beta);
  auto swapped = jjl::not_gate(s);
  CHECK(swapped.alpha == std::complex<double>{0.8, 0.0});
  CHECK(swapped.beta == std::complex<double>{0.6, 0.0});
  QubitState bad{1.0, 1.0};
  CHECK_THROWS_AS(jjl::not_gate(bad), std::invalid_argument);
}

TEST_CASE("NOT conjugation sends the bias to its negative") {
  EffectiveParams p{0.9, 0.35};
  Eigen::Matrix2cd conj = sigma_x() * jjl::effective_hamiltonian(p) * sigma_x();
  Eigen::Matrix2cd want = jjl::effective_hamiltonian({-p.epsilon, p.delta});
  CHECK((conj - want).norm() < 1e-15);
}

TEST_CASE("fit round trip on the reference lattice doublet") {
  jjl::LadderSpec spec;  // N=3 crossed ladder defaults
  auto basis = jjl::ChargeBasis::build(spec.n_sites(), spec.n_max, 0);
  auto h = jjl::build_hamiltonian(spec, basis);
  auto eigs = jjl::ground_spectrum(h, 3, {7, 1e-9, 350});
  auto x = jjl::chirality_sum_operator(spec, basis);
  auto fit = jjl::fit_effective(
      {eigs[0].value, eigs[1].value, eigs[2].value, eigs[0].vector, eigs[1].vector}, x);

  // Symmetric ladder: no bias, splitting carried by the tunneling term.
  CHECK(std::abs(fit.params.epsilon) < 1e-10);
  CHECK(fit.params.delta == doctest::Approx(eigs[1].value - eigs[0].value).epsilon(1e-10));
  CHECK(std::hypot(fit.params.epsilon, fit.params.delta) ==
        doctest::Approx(eigs[1].value - eigs[0].value).epsilon(1e-10));

  // Rebuilt 2x2 reproduces the splitting exactly.
  Eigen::Matrix2cd heff = jjl::effective_hamiltonian(fit.params);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(heff);
  CHECK(es.eigenvalues()(1) - es.eigenvalues()(0) ==
        doctest::Approx(eigs[1].value - eigs[0].value).epsilon(1e-10));

  // Logical states: orthonormal, chirality-split, fixed phase.
  CHECK(std::abs(fit.logical0.norm() - 1.0) < 1e-12);
  CHECK(std::abs(fit.logical0.dot(fit.logical1)) < 1e-10);
  double x0 = std::real(fit.logical0.dot(x.apply(fit.logical0)));
  double x1 = std::real(fit.logical1.dot(x.apply(fit.logical1)));
  CHECK(x0 < 0.0);
  CHECK(x1 > 0.0);

  // Two-level rejection when the third level crowds the doublet.
  jjl::DoubletInput crowded{eigs[0].value, eigs[1].value,
                            eigs[1].value + 0.5 * (eigs[1].value - eigs[0].value),
                            eigs[0].vector, eigs[1].vector};
  CHECK_THROWS_AS(jjl::fit_effective(crowded, x), jjl::TwoLevelRejection);
}

TEST_CASE("register Hamiltonian: single-qubit cross-walk and couplings") {
  // K = 1: H_register = eps sz + Delta sx equals 2 Z H_eff Z exactly.
  RegisterSpec one;
  one.n_qubits = 1;
  one.epsilon = {0.7};
  one.delta = {0.2};
  auto h1 = jjl::register_hamiltonian(one);
  Eigen::Matrix2cd cross = 2.0 * sigma_z() * jjl::effective_hamiltonian({0.7, 0.2}) * sigma_z();
  CHECK((h1 - cross).norm() < 1e-15);

  // K = 2, no coupling: spectrum is the tensor sum of single-qubit levels.
  RegisterSpec two;
  two.n_qubits = 2;
  two.epsilon = {0.4, 0.9};
  two.delta = {0.3, 0.1};
  auto h2 = jjl::register_hamiltonian(two);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h2);
  std::vector<double> want;
  for (double s1 : {-1.0, 1.0})
    for (double s2 : {-1.0, 1.0})
      want.push_back(s1 * std::hypot(two.epsilon[0], two.delta[0]) +
                     s2 * std::hypot(two.epsilon[1], two.delta[1]));
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 4; ++i) CHECK(es.eigenvalues()(i) == doctest::Approx(want[i]).epsilon(1e-12));

  // Pure zz coupling: spectrum {+1, -1, -1, +1}.
  RegisterSpec zz;
  zz.n_qubits = 2;
  zz.epsilon = {0.0, 0.0};
  zz.delta = {0.0, 0.0};
  zz.couplings = {{0, 1, 1.0}};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ez(jjl::register_hamiltonian(zz));
  CHECK(ez.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(ez.eigenvalues()(1) == doctest::Approx(-1.0));
  CHECK(ez.eigenvalues()(2) == doctest::Approx(1.0));
  CHECK(ez.eigenvalues()(3) == doctest::Approx(1.0));

  RegisterSpec big;
  big.n_qubits = 13;
  CHECK_THROWS_AS(jjl::register_hamiltonian(big), std::invalid_argument);
}

TEST_CASE("scaling all register energies rescales the spectrum only") {
  RegisterSpec spec;
  spec.n_qubits = 2;
  spec.epsilon = {0.4, -0.2};
  spec.delta = {0.3, 0.5};
  spec.couplings = {{0, 1, 0.25}};
  auto h = jjl::register_hamiltonian(spec);
  RegisterSpec scaled = spec;
  const double c = 3.7;
  for (auto& e : scaled.epsilon) e *= c;
  for (auto& d : scaled.delta) d *= c;
  for (auto& l : scaled.couplings) l.lambda *= c;
  auto hc = jjl::register_hamiltonian(scaled);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(h), eb(hc);
  for (int i = 0; i < 4; ++i) {
    CHECK(eb.eigenvalues()(i) == doctest::Approx(c * ea.eigenvalues()(i)).epsilon(1e-10));
    double overlap = std::abs(ea.eigenvectors().col(i).dot(eb.eigenvectors().col(i)));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("uncoupled register evolution factorizes; coupling entangles") {
  RegisterSpec free2;
  free2.n_qubits = 2;
  free2.epsilon = {0.3, 0.6};
  free2.delta = {0.5, 0.2};
  auto h = jjl::register_hamiltonian(free2);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(4);
  psi0[0] = 1.0;  // |00>
  const double t = 1.3;
  auto psiT = jjl::register_evolve(h, psi0, t);
  CHECK(std::abs(psiT.norm() - 1.0) < 1e-12);

  // Tensor product of single-qubit evolutions (register convention:
  // H_1 = eps sz + Delta sx per qubit).
  auto single = [&](double eps, double delta) {
    Eigen::Matrix2cd hq = eps * sigma_z() + delta * sigma_x();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(hq);
    Eigen::Vector2cd phases;
    for (int i = 0; i < 2; ++i)
      phases[i] = std::exp(std::complex<double>(0, -t * es.eigenvalues()(i)));
    Eigen::Vector2cd v0;
    v0 << 1.0, 0.0;
    return (es.eigenvectors() *
            (phases.array() * (es.eigenvectors().adjoint() * v0).array()).matrix())
        .eval();
  };
  auto q0 = single(free2.epsilon[0], free2.delta[0]);
  auto q1 = single(free2.epsilon[1], free2.delta[1]);
  for (int b1 = 0; b1 < 2; ++b1)
    for (int b0 = 0; b0 < 2; ++b0)
      CHECK(std::abs(psiT[b0 | (b1 << 1)] - q0[b0] * q1[b1]) < 1e-12);
  CHECK(jjl::entanglement_entropy(psiT, 2, 0) < 1e-10);

  RegisterSpec coupled = free2;
  coupled.epsilon = {0.0, 0.0};
  coupled.delta = {0.3, 0.3};
  coupled.couplings = {{0, 1, 0.5}};
  auto hcpl = jjl::register_hamiltonian(coupled);
  auto ent = jjl::register_evolve(hcpl, psi0, 2.0);
  CHECK(jjl::entanglement_entropy(ent, 2, 0) > 0.01);
}
