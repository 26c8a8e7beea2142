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

// Torus conformal blocks of the twisted c = 2 model: Ising characters with
// argument, charged characters K_l, the c = 3/2 blocks, and the nine full
// sector characters.  One character per degenerate ground state of the
// closed ladder.
//
// Square roots of theta ratios are branch-tracked along a canonical dog-leg
// path from 0 (offset into the upper half plane to clear the real-axis zeros
// of theta2); a nonzero isospin argument w_n is applied to every Ising factor
// of a product, via the combination formulas
//   (chi_0 +- chi_1/2)(w) = sqrt(theta_{3,4}(w)/eta),
//   chi_1/16(w)           = sqrt(theta_2(w)/(2 eta)).

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "jjl/modular.hpp"

namespace jjl {

enum class IsingWeight { kZero, kHalf, kSixteenth };

struct IsingLabel {
  IsingWeight weight = IsingWeight::kZero;
  bool barred = false;  // sector bookkeeping only; evaluation is identical
};

struct ChargedIndex {
  int l = 0;  // mod 4
  int wrapped() const { return ((l % 4) + 4) % 4; }
};

enum class Sector { kAP, kAA, kPA, kPP };

inline bool is_twisted(Sector s) { return s == Sector::kAP || s == Sector::kAA; }

struct CharacterId {
  Sector sector = Sector::kAP;
  int index = 0;  // 0/1 for A-P, A-A, P-A; 0=alpha, 1=beta, 2=gamma for P-P

  bool operator==(const CharacterId&) const = default;
};

const std::array<CharacterId, 9>& all_character_ids();
std::string to_string(Sector s);
std::string to_string(CharacterId id);
std::optional<CharacterId> parse_character_id(const std::string& name);

struct CharOptions {
  // The A-A index-1 block is implemented with (K1 + K3) as printed; this
  // switch evaluates the (K1 - K3) variant so reports can show both.
  bool aa1_k_minus = false;
  double path_offset = 1e-3;  // upper half-plane offset of the canonical path
  // Negative-control hook: corrupts the registry (flips one K sign in the
  // A-P(0) block) so the identity suite must fail loudly.
  bool fault_registry = false;
};

// Registry: the frozen id -> formula map, exported to JSON so index meanings
// cannot silently shift.
struct RegistryEntry {
  CharacterId id;
  std::string name;
  std::string anchor;
  std::string formula;
};
const std::vector<RegistryEntry>& character_registry();

struct CheckAnchor {
  std::string anchor;
  std::string description;
};
const std::vector<CheckAnchor>& check_anchors();
bool known_anchor(const std::string& anchor);
std::string registry_json();

namespace detail {

// Evaluation engine over scalar R, one instance per (tau, controls).
template <class R>
class CharacterEngine {
 public:
  using C = cx<R>;
  using Eng = Engine<R>;

  CharacterEngine(std::complex<double> tau, const SeriesControl& ctrl, CharOptions opt = {})
      : tau_(from_std<R>(tau)),
        ctrl_(ctrl),
        opt_(opt),
        eta_(Eng::eta(tau_, ctrl)),
        tau4_(from_std<R>(tau) * C{R(4.0), R(0.0)}) {}

  C tau() const { return tau_; }
  C eta() const { return eta_; }

  C theta_kind(int kind, C z) const { return Eng::jacobi(kind, z, tau_, ctrl_); }

  // Charged character K_l(w|tau) = Theta[l/4;0](2w|4tau)/eta(tau).
  C charged(int l, C w) const {
    l = ((l % 4) + 4) % 4;
    return Eng::theta(2 * l, 0, C{R(2.0), R(0.0)} * w, tau4_, ctrl_) / eta_;
  }

  // Canonical branch path 0 -> w: a dog-leg displaced by delta along the
  // left normal of the straight segment, so lattice zeros sitting on the
  // segment (or at its endpoint) are approached only radially.  For real
  // targets this is the usual +i*delta offset into the upper half plane.
  std::vector<C> canonical_path(C w) const {
    R d{opt_.path_offset};
    R mag = jjl::abs(w);
    if (to_double(mag) == 0.0) return {C{}, C{R(0.0), d}, C{}};
    C normal = C{R(0.0), R(1.0)} * (w / mag) * d;
    return {C{}, normal, w + normal, w};
  }

  // Tracked sqrt(theta_kind(w)/eta) along explicit waypoints.  The initial
  // resolution stays below a quarter of the theta zero spacing min(1, Im tau).
  typename Eng::Tracked sqrt_theta(int kind, const std::vector<C>& path) const {
    auto f = [&](C z) { return theta_kind(kind, z) / eta_; };
    double step = 0.2 * std::min(1.0, to_double(tau_.im));
    return Eng::tracked_sqrt(f, path, M_PI / 8.0, step, ctrl_);
  }

  C ising(IsingWeight wt, C w) const {
    auto path = canonical_path(w);
    switch (wt) {
      case IsingWeight::kZero: {
        auto s3 = sqrt_theta(3, path), s4 = sqrt_theta(4, path);
        return (s3.value + s4.value) / R(2.0);
      }
      case IsingWeight::kHalf: {
        auto s3 = sqrt_theta(3, path), s4 = sqrt_theta(4, path);
        return (s3.value - s4.value) / R(2.0);
      }
      default: {
        auto s2 = sqrt_theta(2, path);
        using std::sqrt;
        return s2.value / sqrt(R(2.0));
      }
    }
  }

  // One summand of a sector character: an isospin factor times a signed
  // combination of charged characters.
  struct Term {
    C iso;
    std::vector<std::pair<int, int>> k;  // (l, sign)
  };

  std::vector<Term> tm_terms(CharacterId id, const std::vector<C>& wn_path) const {
    using std::sqrt;
    const R inv_sqrt2 = R(1.0) / sqrt(R(2.0));
    const auto end = wn_path.back();
    switch (id.sector) {
      case Sector::kAP: {
        C iso = sqrt_theta(2, wn_path).value * sqrt_theta(3, wn_path).value * inv_sqrt2;
        if (id.index == 0) {
          if (opt_.fault_registry) return {{iso, {{0, +1}, {2, -1}}}};
          return {{iso, {{0, +1}, {2, +1}}}};
        }
        return {{iso, {{1, +1}, {3, +1}}}};
      }
      case Sector::kAA: {
        C iso = sqrt_theta(2, wn_path).value * sqrt_theta(4, wn_path).value * inv_sqrt2;
        if (id.index == 0) return {{iso, {{0, +1}, {2, -1}}}};
        if (opt_.aa1_k_minus) return {{iso, {{1, +1}, {3, -1}}}};
        return {{iso, {{1, +1}, {3, +1}}}};
      }
      case Sector::kPA: {
        auto s3 = sqrt_theta(3, wn_path).value, s4 = sqrt_theta(4, wn_path).value;
        C chi0 = (s3 + s4) / R(2.0), chih = (s3 - s4) / R(2.0);
        C ia = chi0 * chi0 - chih * chih;  // chibar_0 chi_0 - chibar_1/2 chi_1/2
        C ib = chi0 * chih - chih * chi0;  // identically zero, kept as printed
        if (id.index == 0) return {{ia, {{0, +1}}}, {ib, {{2, +1}}}};
        return {{ib, {{0, +1}}}, {ia, {{2, +1}}}};
      }
      default: {
        // P-P: single-valued c = 1 isospin factors theta_k(w)/(2 eta).
        int kind = (id.index == 0) ? 4 : (id.index == 1) ? 3 : 2;
        C iso = theta_kind(kind, end) / (R(2.0) * eta_);
        if (id.index == 0) return {{iso, {{0, +1}, {2, -1}}}};
        if (id.index == 1) return {{iso, {{0, +1}, {2, +1}}}};
        return {{iso, {{1, +1}, {3, +1}}}};
      }
    }
  }

  C assemble(const std::vector<Term>& terms, C wc) const {
    C total{};
    for (const auto& t : terms) {
      C kc{};
      for (auto [l, sgn] : t.k) {
        C kv = charged(l, wc);
        kc += (sgn > 0) ? kv : -kv;
      }
      total += t.iso * kc;
    }
    return total;
  }

  C tm(CharacterId id, C wn, C wc) const { return assemble(tm_terms(id, canonical_path(wn)), wc); }

  // c = 3/2 blocks at isospin argument 0.
  C c32(int j, C wc) const {
    C chi0 = ising(IsingWeight::kZero, C{});
    C chih = ising(IsingWeight::kHalf, C{});
    C chis = ising(IsingWeight::kSixteenth, C{});
    switch (j) {
      case 0: return chi0 * charged(0, wc) + chih * charged(2, wc);
      case 1: return chis * (charged(1, wc) + charged(3, wc));
      case 2: return chih * charged(0, wc) + chi0 * charged(2, wc);
      default: throw std::invalid_argument("c32_block: j must be 0..2");
    }
  }

  // Magnitude scale of the character family at (wn, wc): the largest
  // isospin factor magnitude times the summed charged magnitudes.  Used to
  // normalize cancellation residuals.
  R family_scale(const std::vector<C>& wn_path, C wc) const {
    R iso_max{};
    for (auto id : all_character_ids()) {
      for (const auto& t : tm_terms(id, wn_path)) {
        R m = jjl::abs(t.iso);
        if (to_double(m) > to_double(iso_max)) iso_max = m;
      }
    }
    R ksum{};
    for (int l = 0; l < 4; ++l) ksum += jjl::abs(charged(l, wc));
    return iso_max * ksum;
  }

 private:
  C tau_;
  SeriesControl ctrl_;
  CharOptions opt_;
  C eta_;
  C tau4_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Public double-precision surface.

std::complex<double> ising_char(const IsingLabel& label, std::complex<double> w,
                                const TorusModulus& modulus, const SeriesControl& ctrl = {},
                                const CharOptions& opt = {});

std::complex<double> charged_char(const ChargedIndex& l, std::complex<double> w_c,
                                  const TorusModulus& modulus, const SeriesControl& ctrl = {});

std::complex<double> c32_block(int j, std::complex<double> w_c, const TorusModulus& modulus,
                               const SeriesControl& ctrl = {}, const CharOptions& opt = {});

std::complex<double> tm_character(CharacterId id, std::complex<double> w_n,
                                  std::complex<double> w_c, const TorusModulus& modulus,
                                  const SeriesControl& ctrl = {}, const CharOptions& opt = {});

// Coherent-state wave function for M particles:
//   exp(i pi M tau sum y_i^2) prod_{i<j} [theta1(w_ij)/theta1'(0)]^4 chi_id(sum w_i)
std::complex<double> wavefunction(const std::vector<std::complex<double>>& positions,
                                  CharacterId id, const TorusModulus& modulus,
                                  const SeriesControl& ctrl = {}, const CharOptions& opt = {});

}  // namespace jjl
