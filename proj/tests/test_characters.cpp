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

#include <complex>
#include <random>
#include <vector>

#include "jjl/characters.hpp"

using jjl::CharacterId;
using jjl::IsingWeight;
using jjl::Sector;
using jjl::TorusModulus;
using std::complex;

namespace {

constexpr complex<double> kI{0.0, 1.0};

std::mt19937_64 rng(4711);

TorusModulus random_tau() {
  std::uniform_real_distribution<double> ux(-0.4, 0.4), uy(0.8, 1.8);
  return TorusModulus{{ux(rng), uy(rng)}};
}

complex<double> random_w(const TorusModulus& tau) {
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, tau.tau.imag() / 4.0);
  return {ux(rng), uy(rng)};
}

// Truncated power series in x = q^{1/2}, the independent route for the
// small-q expansion of the square-root characters.
struct QSeries {
  std::vector<double> c;

  explicit QSeries(int n) : c(n + 1, 0.0) {}
  int order() const { return static_cast<int>(c.size()) - 1; }

  QSeries mul(const QSeries& o) const {
    QSeries r(order());
    for (int i = 0; i <= order(); ++i)
      for (int j = 0; i + j <= order() && j <= o.order(); ++j) r.c[i + j] += c[i] * o.c[j];
    return r;
  }
  QSeries inverse() const {
    QSeries r(order());
    r.c[0] = 1.0 / c[0];
    for (int k = 1; k <= order(); ++k) {
      double s = 0.0;
      for (int j = 1; j <= k; ++j) s += c[j] * r.c[k - j];
      r.c[k] = -s / c[0];
    }
    return r;
  }
  QSeries sqrt() const {
    QSeries r(order());
    r.c[0] = std::sqrt(c[0]);
    for (int k = 1; k <= order(); ++k) {
      double s = 0.0;
      for (int j = 1; j < k; ++j) s += r.c[j] * r.c[k - j];
      r.c[k] = (c[k] - s) / (2.0 * r.c[0]);
    }
    return r;
  }
};

QSeries theta3_series(int n, int sign) {  // sign +1: theta3, -1: theta4
  QSeries t(n);
  t.c[0] = 1.0;
  for (int m = 1; m * m <= n; ++m) t.c[m * m] = 2.0 * (m % 2 == 1 ? sign : 1);
  return t;
}

QSeries euler_product(int n) {  // prod (1 - q^m) with q = x^2
  QSeries p(n);
  p.c[0] = 1.0;
  for (int m = 1; 2 * m <= n; ++m) {
    QSeries f(n);
    f.c[0] = 1.0;
    f.c[2 * m] = -1.0;
    p = p.mul(f);
  }
  return p;
}

}  // namespace

TEST_CASE("vacuum character q-expansion matches the series oracle") {
  const int n = 22;  // x-order; q-order 11
  auto pinv = euler_product(n).inverse();
  auto splus = theta3_series(n, +1).mul(pinv).sqrt();
  auto sminus = theta3_series(n, -1).mul(pinv).sqrt();
  // chi_0 * q^{1/48} = (sqrt(theta3/P) + sqrt(theta4/P))/2 as a series in q.
  std::vector<double> coeff;
  for (int m = 0; 2 * m <= n; ++m) coeff.push_back(0.5 * (splus.c[2 * m] + sminus.c[2 * m]));
  // Low orders of the Ising vacuum module: 1, 0, 1, 1, 2, 2, 3, ...
  CHECK(coeff[0] == doctest::Approx(1.0));
  CHECK(coeff[1] == doctest::Approx(0.0));
  CHECK(coeff[2] == doctest::Approx(1.0));
  CHECK(coeff[3] == doctest::Approx(1.0));
  CHECK(coeff[4] == doctest::Approx(2.0));

  for (double imtau : {2.2, 2.6, 3.0}) {
    TorusModulus tau{{0.0, imtau}};
    complex<double> q = std::exp(2.0 * M_PI * kI * tau.tau);
    complex<double> oracle = 0.0;
    for (int m = 0; m < static_cast<int>(coeff.size()); ++m)
      oracle += coeff[m] * std::pow(q, m);
    auto chi0 = jjl::ising_char({IsingWeight::kZero, false}, {0.0, 0.0}, tau);
    auto lhs = chi0 * std::pow(q, 1.0 / 48.0);
    CHECK(std::abs(lhs - oracle) / std::abs(oracle) < 1e-12);
  }
}

TEST_CASE("character leading exponents at large Im tau") {
  TorusModulus tau{{0.0, 6.0}};
  complex<double> q = std::exp(2.0 * M_PI * kI * tau.tau);
  auto chi0 = jjl::ising_char({IsingWeight::kZero, false}, {0.0, 0.0}, tau);
  auto chih = jjl::ising_char({IsingWeight::kHalf, false}, {0.0, 0.0}, tau);
  auto chis = jjl::ising_char({IsingWeight::kSixteenth, false}, {0.0, 0.0}, tau);
  CHECK(std::abs(chi0 * std::pow(q, 1.0 / 48.0) - 1.0) < 1e-10);
  CHECK(std::abs(chih * std::pow(q, 1.0 / 48.0 - 0.5) - 1.0) < 1e-8);
  CHECK(std::abs(chis * std::pow(q, 1.0 / 48.0 - 1.0 / 16.0) - 1.0) < 1e-8);
}

TEST_CASE("twist character flips sign under the A-cycle shift") {
  for (int i = 0; i < 10; ++i) {
    auto tau = random_tau();
    auto a = jjl::ising_char({IsingWeight::kSixteenth, false}, {2.0, 0.0}, tau);
    auto b = jjl::ising_char({IsingWeight::kSixteenth, false}, {0.0, 0.0}, tau);
    CHECK(std::abs(a + b) / std::abs(b) < 1e-8);
  }
}

TEST_CASE("barred and unbarred labels evaluate identically") {
  auto tau = random_tau();
  auto w = random_w(tau);
  for (auto wt : {IsingWeight::kZero, IsingWeight::kHalf, IsingWeight::kSixteenth}) {
    auto a = jjl::ising_char({wt, false}, w, tau);
    auto b = jjl::ising_char({wt, true}, w, tau);
    CHECK(a == b);
  }
}

TEST_CASE("charged characters: periodicity and the wide-window value") {
  for (int i = 0; i < 20; ++i) {
    auto tau = random_tau();
    auto w = random_w(tau);
    for (int l = 0; l < 4; ++l) {
      auto a = jjl::charged_char({l}, w + 2.0, tau);
      auto b = jjl::charged_char({l}, w, tau);
      CHECK(std::abs(a - b) / std::abs(b) < 1e-10);
    }
  }
  // K_0(0|i) = (1/eta) sum_n exp(4 pi i tau n^2), tau = i.
  TorusModulus ti{{0.0, 1.0}};
  complex<double> brute = 0.0;
  for (int n = -50; n <= 50; ++n) brute += std::exp(-4.0 * M_PI * n * n);
  brute /= jjl::dedekind_eta(ti);
  auto k0 = jjl::charged_char({0}, {0.0, 0.0}, ti);
  CHECK(std::abs(k0 - brute) / std::abs(brute) < 1e-14);
  // Index wraps mod 4.
  auto k5 = jjl::charged_char({5}, {0.1, 0.05}, ti);
  auto k1 = jjl::charged_char({1}, {0.1, 0.05}, ti);
  CHECK(k5 == k1);
}

TEST_CASE("charged regression goldens (frozen from the first validated build)") {
  TorusModulus tau{{0.3, 1.1}};
  complex<double> w{0.23, 0.11};
  const complex<double> want[4] = {
      {0.05604727329202995, -0.030470688247231047},
      {-0.67068943228581002, 0.42497694962667887},
      {1.3293098278534041, -0.10334870055049294},
      {-0.25483423648165704, -0.3065423125283801},
  };
  for (int l = 0; l < 4; ++l) {
    auto v = jjl::charged_char({l + 2}, w + 1.0, tau);
    CHECK(std::abs(v - want[l]) < 1e-13);
  }
}

TEST_CASE("c = 3/2 blocks assemble from tested parts") {
  TorusModulus tau{{0.0, 2.0}};
  complex<double> wc{0.0, 0.0};
  auto chi0 = jjl::ising_char({IsingWeight::kZero, false}, {0.0, 0.0}, tau);
  auto chih = jjl::ising_char({IsingWeight::kHalf, false}, {0.0, 0.0}, tau);
  auto k0 = jjl::charged_char({0}, wc, tau);
  auto k2 = jjl::charged_char({2}, wc, tau);
  auto want = chi0 * k0 + chih * k2;
  CHECK(std::abs(jjl::c32_block(0, wc, tau) - want) < 1e-13 * std::abs(want));

  // Sum rule chi_(0) + chi_(2) = (chi_0 + chi_1/2)(K_0 + K_2).
  for (int i = 0; i < 5; ++i) {
    auto t = random_tau();
    auto w = random_w(t);
    auto lhs = jjl::c32_block(0, w, t) + jjl::c32_block(2, w, t);
    auto sum = jjl::ising_char({IsingWeight::kZero, false}, {0.0, 0.0}, t) +
               jjl::ising_char({IsingWeight::kHalf, false}, {0.0, 0.0}, t);
    auto rhs = sum * (jjl::charged_char({0}, w, t) + jjl::charged_char({2}, w, t));
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-12);
    // The twisted block has no zeros on the sample.
    CHECK(std::abs(jjl::c32_block(1, w, t)) > 1e-8);
  }
}

TEST_CASE("sector characters assemble from parts") {
  for (int i = 0; i < 5; ++i) {
    auto tau = random_tau();
    auto wc = random_w(tau);
    auto chis = jjl::ising_char({IsingWeight::kSixteenth, true}, {0.0, 0.0}, tau);
    auto chi0 = jjl::ising_char({IsingWeight::kZero, false}, {0.0, 0.0}, tau);
    auto chih = jjl::ising_char({IsingWeight::kHalf, false}, {0.0, 0.0}, tau);
    auto k0 = jjl::charged_char({0}, wc, tau);
    auto k2 = jjl::charged_char({2}, wc, tau);
    auto want = chis * (chi0 + chih) * (k0 + k2);
    auto got = jjl::tm_character({Sector::kAP, 0}, {0.0, 0.0}, wc, tau);
    CHECK(std::abs(got - want) / std::abs(want) < 1e-12);
  }
}

TEST_CASE("P-P alpha plus beta expands over the four product terms") {
  // Expanding the alpha and beta products gives
  //   (chi0~ chi0 + chi12~ chi12) K0 + (chi0~ chi12 + chi12~ chi0) K2.
  for (int i = 0; i < 5; ++i) {
    auto tau = random_tau();
    auto wc = random_w(tau);
    auto lhs = jjl::tm_character({Sector::kPP, 0}, {0.0, 0.0}, wc, tau) +
               jjl::tm_character({Sector::kPP, 1}, {0.0, 0.0}, wc, tau);
    auto chi0 = jjl::ising_char({IsingWeight::kZero, false}, {0.0, 0.0}, tau);
    auto chih = jjl::ising_char({IsingWeight::kHalf, false}, {0.0, 0.0}, tau);
    auto k0 = jjl::charged_char({0}, wc, tau);
    auto k2 = jjl::charged_char({2}, wc, tau);
    auto rhs = (chi0 * chi0 + chih * chih) * k0 + (chi0 * chih + chih * chi0) * k2;
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-12);
  }
}

TEST_CASE("all blocks are single-valued in w_c -> w_c + 2") {
  auto tau = random_tau();
  for (auto id : jjl::all_character_ids()) {
    for (int i = 0; i < 3; ++i) {
      auto wc = random_w(tau);
      auto a = jjl::tm_character(id, {0.0, 0.0}, wc + 2.0, tau);
      auto b = jjl::tm_character(id, {0.0, 0.0}, wc, tau);
      CHECK(std::abs(a - b) <= 1e-9 * std::abs(b));
    }
  }
}

TEST_CASE("characters are real and positive at the origin for imaginary tau") {
  for (double y : {1.0, 1.5, 2.0}) {
    TorusModulus tau{{0.0, y}};
    for (auto id : jjl::all_character_ids()) {
      auto v = jjl::tm_character(id, {0.0, 0.0}, {0.0, 0.0}, tau);
      CHECK(v.real() > 0.0);
      CHECK(std::abs(v.imag()) < 1e-12 * v.real());
    }
  }
}

TEST_CASE("coherent-state wave function properties") {
  TorusModulus tau{{0.0, 1.3}};
  CharacterId id{Sector::kAP, 0};
  std::vector<complex<double>> pos = {{0.11, 0.21}, {0.45, 0.08}, {-0.32, 0.17}};

  auto base = jjl::wavefunction(pos, id, tau);
  std::swap(pos[0], pos[1]);
  auto swapped = jjl::wavefunction(pos, id, tau);
  CHECK(std::abs(base - swapped) / std::abs(base) < 1e-12);

  // Two-particle case assembles from jacobi_theta calls.
  std::vector<complex<double>> two = {{0.11, 0.21}, {0.45, 0.08}};
  auto wf = jjl::wavefunction(two, id, tau);
  auto t1 = jjl::jacobi_theta(1, two[0] - two[1], tau);
  auto tp = jjl::theta1_prime0(tau);
  auto jas = std::pow(t1 / tp, 4.0);
  double ysq = 0.0;
  for (auto p : two) ysq += std::pow(p.imag() / tau.tau.imag(), 2);
  auto gauss = std::exp(kI * M_PI * 2.0 * tau.tau * ysq);
  auto chi = jjl::tm_character(id, {0.0, 0.0}, two[0] + two[1], tau);
  auto want = gauss * jas * chi;
  CHECK(std::abs(wf - want) / std::abs(want) < 1e-11);

  // Quasi-periodicity under a unit shift of one coordinate: the Jastrow
  // factor is invariant ((-1)^4) and the magnitude ratio follows the
  // character shift and the Gaussian prefactor alone.
  std::vector<complex<double>> shifted = {two[0] + 1.0, two[1]};
  auto wf1 = jjl::wavefunction(shifted, id, tau);
  auto chi_shift = jjl::tm_character(id, {0.0, 0.0}, two[0] + two[1] + 1.0, tau);
  auto ratio = wf1 / wf;
  auto want_ratio = chi_shift / chi;
  CHECK(std::abs(ratio - want_ratio) / std::abs(want_ratio) < 1e-10);

  // Coincident positions trip the guard.
  std::vector<complex<double>> bad = {{0.1, 0.1}, {0.1, 0.1}};
  CHECK_THROWS_AS(jjl::wavefunction(bad, id, tau), std::invalid_argument);
  std::vector<complex<double>> lattice_bad = {{0.1, 0.1}, {1.1, 0.1}};
  CHECK_THROWS_AS(jjl::wavefunction(lattice_bad, id, tau), std::invalid_argument);
}

TEST_CASE("registry is frozen and complete") {
  const auto& reg = jjl::character_registry();
  CHECK(reg.size() == 9);
  for (const auto& e : reg) {
    CHECK(jjl::known_anchor(e.anchor));
    CHECK(!e.formula.empty());
    auto parsed = jjl::parse_character_id(e.name);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == e.id);
  }
  CHECK(jjl::known_anchor("charged.periodicity"));
  CHECK(!jjl::known_anchor("no.such.anchor"));
  auto js = jjl::registry_json();
  CHECK(js.find("\"P-P(gamma)\"") != std::string::npos);
  CHECK(js.find("formula") != std::string::npos);
}
