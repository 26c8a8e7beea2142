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

// Magnetic translation operators, half-period flux insertion, A-cycle
// monodromy transport, and the sector stability classification that singles
// out the protected qubit subspace.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jjl/characters.hpp"
#include "jjl/modular.hpp"

namespace jjl {

using TorusFunction = std::function<std::complex<double>(std::complex<double>)>;

struct MagneticTranslationContext {
  int flux_quanta = 1;  // M
  Rational alpha{0, 1};
  TorusModulus modulus;

  MagneticTranslationContext(int m, Rational a, TorusModulus mod)
      : flux_quanta(m), alpha(a), modulus(mod) {
    if (m < 1) throw std::invalid_argument("MagneticTranslationContext: M >= 1");
    if (a.den != 1 && a.den != 2)
      throw std::invalid_argument("MagneticTranslationContext: alpha denominator in {1,2}");
  }
};

// S_a f(w) = f(w + a)
std::complex<double> translate_S(const MagneticTranslationContext& ctx, const TorusFunction& f,
                                 std::complex<double> w);

// T_a f(w) = exp(i pi M (a^2 tau + 2 a w)) f(w + a tau)
std::complex<double> translate_T(const MagneticTranslationContext& ctx, const TorusFunction& f,
                                 std::complex<double> w);

// Half-period flux map on a charged character:
//   value    = exp((1/2)^2 i pi tau + i pi w_c) K_l(w_c + tau/2 | tau)
//   expected = K_{l+1 mod 4}(w_c | tau)
std::pair<std::complex<double>, std::complex<double>> flux_insert_charged(
    const ChargedIndex& l, std::complex<double> w_c, const TorusModulus& modulus,
    const SeriesControl& ctrl = {});

struct FluxThresholds {
  double zero = 1e-8;            // normalized residual bound for "decoupled"
  double match = 1e-8;           // relative error bound for maps_to / excites_to
  double constant_drift = 1e-9;  // fitted constant must stay this flat
  double anomaly = 1e-6;         // |c - 1| above this flags a convention anomaly

  static FluxThresholds for_precision(Precision p) {
    FluxThresholds t;
    if (p == Precision::kExtended) t.zero = 1e-20;
    return t;
  }
};

enum class FluxClass { kDecoupled, kMapsTo, kExcitesTo };

std::string to_string(FluxClass c);

struct FluxActionResult {
  FluxClass cls = FluxClass::kDecoupled;
  std::optional<CharacterId> target;
  double residual = 0.0;  // max normalized residual / relative error over samples
  std::complex<double> constant{1.0, 0.0};
  bool constant_anomaly = false;
  int samples = 0;
};

struct FluxSampleRow {
  std::complex<double> w_c;
  double residual;
};

struct FluxClassificationError : std::runtime_error {
  std::vector<FluxSampleRow> rows;
  FluxClassificationError(const std::string& what, std::vector<FluxSampleRow> r)
      : std::runtime_error(what), rows(std::move(r)) {}
};

// Evaluates T_{1/2} applied to the character over the sample points and
// classifies against the candidate set.  A classification mismatch is a
// first-class outcome and throws FluxClassificationError with per-sample
// residuals attached.
FluxActionResult flux_insert_full(CharacterId id, const TorusModulus& modulus,
                                  std::span<const std::complex<double>> w_samples,
                                  const SeriesControl& ctrl = {},
                                  const FluxThresholds& thr = {}, const CharOptions& opt = {},
                                  std::vector<FluxSampleRow>* sample_rows = nullptr);

// The classification the identity table asserts.
std::pair<FluxClass, std::optional<CharacterId>> expected_flux_action(CharacterId id);

struct MonodromyResult {
  std::complex<double> phase;  // end/start ratio
  double deviation;            // distance to the nearest of {+1, -1}
  std::optional<double> snapped;  // only set when deviation < 1e-6
};

// Simultaneous transport (w_n, w_c) -> (w_n+2, w_c+2) along branch-tracked
// paths (offset into the upper half plane by path_offset).
MonodromyResult monodromy_transport(CharacterId id, const TorusModulus& modulus,
                                    double path_offset = 1e-3, const SeriesControl& ctrl = {},
                                    const CharOptions& opt = {});

// Charged-only transport w_c -> w_c + 2 with w_n held fixed.
MonodromyResult monodromy_charged_only(CharacterId id, const TorusModulus& modulus,
                                       const SeriesControl& ctrl = {},
                                       const CharOptions& opt = {});

std::vector<std::complex<double>> default_wc_samples(const TorusModulus& modulus, int n,
                                                     std::uint64_t seed);
std::vector<TorusModulus> default_modulus_samples();

struct StabilityRow {
  CharacterId id;
  TorusModulus modulus;
  std::string classification;
  std::optional<CharacterId> target;
  double residual = 0.0;
  std::complex<double> constant{1.0, 0.0};
  bool anomaly = false;
  bool expected_match = false;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  bool all_expected = false;
  bool tau_independent = false;  // same classification for every modulus sample
  std::string to_text() const;
};

// Aggregates flux_insert_full over all nine blocks and every modulus sample.
// Classification mismatches become rows with expected_match = false rather
// than exceptions.  Honors the JJL_THREADS fan-out internally; row order is
// fixed regardless.
StabilityReport stability_report(std::span<const TorusModulus> moduli, int wc_per_tau,
                                 std::uint64_t seed, const SeriesControl& ctrl = {},
                                 const FluxThresholds& thr = {}, const CharOptions& opt = {});

}  // namespace jjl
