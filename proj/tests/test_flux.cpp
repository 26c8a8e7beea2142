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

#include "jjl/flux.hpp"

using jjl::CharacterId;
using jjl::MagneticTranslationContext;
using jjl::Sector;
using jjl::TorusModulus;
using std::complex;

namespace {

constexpr complex<double> kI{0.0, 1.0};
std::mt19937_64 rng(90210);

complex<double> random_w(const TorusModulus& tau) {
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, tau.tau.imag() / 4.0);
  return {ux(rng), uy(rng)};
}

}  // namespace

TEST_CASE("magnetic translations: identities and periods") {
  TorusModulus tau{{0.2, 1.2}};
  auto f = [&](complex<double> w) { return jjl::jacobi_theta(3, w, tau); };

  MagneticTranslationContext id_ctx{1, {0, 1}, tau};
  auto w = random_w(tau);
  CHECK(jjl::translate_S(id_ctx, f, w) == f(w));
  CHECK(jjl::translate_T(id_ctx, f, w) == f(w));

  // theta3 has period 1; K_l has period 2.
  MagneticTranslationContext s1{1, {1, 1}, tau};
  CHECK(std::abs(jjl::translate_S(s1, f, w) - f(w)) / std::abs(f(w)) < 1e-12);
  auto k0 = [&](complex<double> z) { return jjl::charged_char({0}, z, tau); };
  MagneticTranslationContext s2{1, {2, 1}, tau};
  CHECK(std::abs(jjl::translate_S(s2, k0, w) - k0(w)) / std::abs(k0(w)) < 1e-10);

  CHECK_THROWS_AS((MagneticTranslationContext{0, {1, 2}, tau}), std::invalid_argument);
  CHECK_THROWS_AS((MagneticTranslationContext{1, {1, 4}, tau}), std::invalid_argument);
}

TEST_CASE("translation commutator carries e^{2 pi i M a b}") {
  TorusModulus tau{{0.1, 1.4}};
  for (int m : {1, 2, 4}) {
    auto f = [&](complex<double> w) {
      return jjl::theta_char_at({{1, 4}, {0, 1}}, 2.0 * w,
                                4.0 * tau.tau);  // theta-built test function
    };
    MagneticTranslationContext ctx{m, {1, 1}, tau};
    for (int i = 0; i < 10; ++i) {
      auto w = random_w(tau);
      auto st = jjl::translate_S(ctx, [&](complex<double> u) {
        return jjl::translate_T(ctx, f, u);
      }, w);
      auto ts = jjl::translate_T(ctx, [&](complex<double> u) {
        return jjl::translate_S(ctx, f, u);
      }, w);
      // S_1 T_1 = e^{2 pi i M} T_1 S_1 = T_1 S_1 for integer M.
      CHECK(std::abs(st - ts) / std::abs(ts) < 1e-9);
    }
  }
}

TEST_CASE("half translation applied twice matches the unit translation") {
  TorusModulus tau{{0.0, 1.1}};
  const int m = 4;
  auto f = [&](complex<double> w) { return jjl::jacobi_theta(3, w, tau); };
  MagneticTranslationContext half{m, {1, 2}, tau};
  MagneticTranslationContext full{m, {1, 1}, tau};
  complex<double> cocycle{};
  for (int i = 0; i < 5; ++i) {
    auto w = random_w(tau);
    auto twice = jjl::translate_T(half, [&](complex<double> u) {
      return jjl::translate_T(half, f, u);
    }, w);
    auto once = jjl::translate_T(full, f, w);
    auto ratio = twice / once;
    if (i == 0) cocycle = ratio;
    CHECK(std::abs(ratio - cocycle) < 1e-9);  // recorded, w-independent
  }
  CHECK(std::abs(cocycle - 1.0) < 1e-9);
}

TEST_CASE("charged flux map steps the index by one, wrapping mod 4") {
  TorusModulus tau{{0.25, 1.3}};
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 20; ++i) {
      auto w = random_w(tau);
      auto [value, expected] = jjl::flux_insert_charged({l}, w, tau);
      CHECK(std::abs(value - expected) / std::abs(expected) < 1e-9);
    }
  }
}

TEST_CASE("four flux steps return the charged character exactly") {
  TorusModulus tau{{0.0, 1.0}};
  auto step = [&](const std::function<complex<double>(complex<double>)>& f) {
    return [&, f](complex<double> w) {
      return std::exp(kI * M_PI * (0.25 * tau.tau + w)) * f(w + 0.5 * tau.tau);
    };
  };
  std::function<complex<double>(complex<double>)> f = [&](complex<double> w) {
    return jjl::charged_char({0}, w, tau);
  };
  auto f4 = step(step(step(step(f))));
  complex<double> factor{};
  for (int i = 0; i < 5; ++i) {
    auto w = random_w(tau);
    auto ratio = f4(w) / f(w);
    if (i == 0) factor = ratio;
    CHECK(std::abs(ratio - factor) < 1e-9);
  }
  CHECK(std::abs(factor - 1.0) < 1e-9);
}

TEST_CASE("full flux action reproduces the sector table") {
  for (auto tau : jjl::default_modulus_samples()) {
    auto samples = jjl::default_wc_samples(tau, 20, 5);
    for (auto id : jjl::all_character_ids()) {
      auto r = jjl::flux_insert_full(id, tau, samples);
      auto [cls, target] = jjl::expected_flux_action(id);
      CHECK(r.cls == cls);
      CHECK(r.target == target);
      CHECK(r.residual < (cls == jjl::FluxClass::kDecoupled ? 1e-8 : 1e-8));
      if (cls != jjl::FluxClass::kDecoupled) {
        CHECK(!r.constant_anomaly);
        CHECK(std::abs(r.constant - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("A-A index-1 block decouples for both charged-combination variants") {
  TorusModulus tau{{0.0, 1.0}};
  auto samples = jjl::default_wc_samples(tau, 12, 5);
  for (bool minus : {false, true}) {
    jjl::CharOptions opt;
    opt.aa1_k_minus = minus;
    auto r = jjl::flux_insert_full({Sector::kAA, 1}, tau, samples, {}, {}, opt);
    CHECK(r.cls == jjl::FluxClass::kDecoupled);
    CHECK(r.residual < 1e-10);
  }
}

TEST_CASE("flux applied twice to an A-P block is the identity on the label") {
  // T^2 chi(0) is proportional to chi(0) with a w_c-independent constant.
  TorusModulus tau{{0.0, 1.0}};
  jjl::SeriesControl ctrl;
  auto twice = [&](CharacterId id, complex<double> wc) {
    auto t = [&](CharacterId i2, complex<double> wn, complex<double> w) {
      auto pref = std::exp(kI * M_PI * (0.5 * tau.tau + wn + w));
      return pref * jjl::tm_character(i2, wn + 0.5 * tau.tau, w + 0.5 * tau.tau, tau, ctrl);
    };
    // Apply the map twice by shifting both arguments twice.
    auto pref1 = std::exp(kI * M_PI * (0.5 * tau.tau + 0.0 + wc));
    auto inner = t(id, 0.5 * tau.tau, wc + 0.5 * tau.tau);
    return pref1 * inner;
  };
  complex<double> factor{};
  for (int i = 0; i < 20; ++i) {
    auto wc = random_w(tau);
    auto val = twice({Sector::kAP, 0}, wc);
    auto base = jjl::tm_character({Sector::kAP, 0}, {0.0, 0.0}, wc, tau);
    auto ratio = val / base;
    if (i == 0) factor = ratio;
    CHECK(std::abs(ratio - factor) / std::abs(factor) < 1e-9);
  }
}

TEST_CASE("classification mismatch surfaces per-sample residuals") {
  TorusModulus tau{{0.0, 1.0}};
  auto samples = jjl::default_wc_samples(tau, 8, 5);
  jjl::CharOptions corrupt;
  corrupt.fault_registry = true;
  CHECK_THROWS_AS(jjl::flux_insert_full({Sector::kAP, 0}, tau, samples, {}, {}, corrupt),
                  jjl::FluxClassificationError);
  try {
    jjl::flux_insert_full({Sector::kAP, 0}, tau, samples, {}, {}, corrupt);
  } catch (const jjl::FluxClassificationError& e) {
    CHECK(e.rows.size() == samples.size());
    double worst = 0.0;
    for (const auto& r : e.rows) worst = std::max(worst, r.residual);
    CHECK(worst > 1e-2);  // far above threshold, loudly
  }
}

TEST_CASE("monodromy dichotomy with path-offset stability") {
  for (auto tau : jjl::default_modulus_samples()) {
    for (auto id : jjl::all_character_ids()) {
      double expected = jjl::is_twisted(id.sector) ? -1.0 : 1.0;
      std::optional<double> first;
      for (double offset : {1e-3, 1e-2}) {
        auto m = jjl::monodromy_transport(id, tau, offset);
        REQUIRE(m.snapped.has_value());
        CHECK(*m.snapped == expected);
        CHECK(m.deviation < 1e-6);
        if (!first) first = *m.snapped;
        CHECK(*first == *m.snapped);
      }
      auto c = jjl::monodromy_charged_only(id, tau);
      REQUIRE(c.snapped.has_value());
      CHECK(*c.snapped == 1.0);
    }
  }
}

TEST_CASE("extended precision tightens the flux residuals") {
  TorusModulus tau{{0.5, 1.0}};
  auto samples = jjl::default_wc_samples(tau, 8, 5);
  jjl::SeriesControl ext;
  ext.precision = jjl::Precision::kExtended;
  ext.tail_tolerance = 1e-28;
  auto thr = jjl::FluxThresholds::for_precision(jjl::Precision::kExtended);
  for (auto id : jjl::all_character_ids()) {
    auto rd = jjl::flux_insert_full(id, tau, samples);
    auto rx = jjl::flux_insert_full(id, tau, samples, ext, thr);
    CHECK(rx.cls == rd.cls);
    CHECK(rx.residual <= rd.residual + 1e-18);
    if (rd.cls == jjl::FluxClass::kDecoupled) CHECK(rx.residual < 1e-20);
  }
}

TEST_CASE("stability report aggregates the table and is modulus independent") {
  auto moduli = jjl::default_modulus_samples();
  auto rep = jjl::stability_report(moduli, 12, 7);
  CHECK(rep.all_expected);
  CHECK(rep.tau_independent);
  CHECK(rep.rows.size() == moduli.size() * 9);
  int decoupled = 0, maps = 0, excites = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& row = rep.rows[i];
    if (row.classification == "decoupled") ++decoupled;
    if (row.classification == "maps_to") ++maps;
    if (row.classification == "excites_to") ++excites;
  }
  CHECK(decoupled == 5);  // two P-A, one P-P alpha, two A-A
  CHECK(maps == 3);       // A-P pair and gamma -> beta
  CHECK(excites == 1);    // beta -> gamma
  auto text = rep.to_text();
  CHECK(text.find("A-P(0)") != std::string::npos);
  CHECK(text.find("MISMATCH") == std::string::npos);
}
