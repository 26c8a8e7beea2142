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

#include "jjl/characters.hpp"

#include <sstream>

namespace jjl {

const std::array<CharacterId, 9>& all_character_ids() {
  static const std::array<CharacterId, 9> ids = {{
      {Sector::kAP, 0},
      {Sector::kAP, 1},
      {Sector::kAA, 0},
      {Sector::kAA, 1},
      {Sector::kPA, 0},
      {Sector::kPA, 1},
      {Sector::kPP, 0},
      {Sector::kPP, 1},
      {Sector::kPP, 2},
  }};
  return ids;
}

std::string to_string(Sector s) {
  switch (s) {
    case Sector::kAP: return "A-P";
    case Sector::kAA: return "A-A";
    case Sector::kPA: return "P-A";
    default: return "P-P";
  }
}

std::string to_string(CharacterId id) {
  if (id.sector == Sector::kPP) {
    static const char* greek[] = {"alpha", "beta", "gamma"};
    return "P-P(" + std::string(greek[id.index]) + ")";
  }
  return to_string(id.sector) + "(" + std::to_string(id.index) + ")";
}

std::optional<CharacterId> parse_character_id(const std::string& name) {
  for (auto id : all_character_ids())
    if (to_string(id) == name) return id;
  return std::nullopt;
}

const std::vector<RegistryEntry>& character_registry() {
  static const std::vector<RegistryEntry> reg = {
      {{Sector::kAP, 0}, "A-P(0)", "tm.AP.0",
       "chi16~(w_n)*(chi0+chi12)(w_n) * (K0+K2)(w_c)"},
      {{Sector::kAP, 1}, "A-P(1)", "tm.AP.1",
       "chi16(w_n)*(chi0~+chi12~)(w_n) * (K1+K3)(w_c)"},
      {{Sector::kAA, 0}, "A-A(0)", "tm.AA.0",
       "chi16~(w_n)*(chi0-chi12)(w_n) * (K0-K2)(w_c)"},
      {{Sector::kAA, 1}, "A-A(1)", "tm.AA.1",
       "chi16(w_n)*(chi0~-chi12~)(w_n) * (K1+K3)(w_c)"},
      {{Sector::kPA, 0}, "P-A(0)", "tm.PA.0",
       "(chi0~*chi0-chi12~*chi12)(w_n)*K0(w_c) + (chi0~*chi12-chi12~*chi0)(w_n)*K2(w_c)"},
      {{Sector::kPA, 1}, "P-A(1)", "tm.PA.1",
       "(chi0~*chi12-chi12~*chi0)(w_n)*K0(w_c) + (chi0~*chi0-chi12~*chi12)(w_n)*K2(w_c)"},
      {{Sector::kPP, 0}, "P-P(alpha)", "tm.PP.alpha",
       "1/2*(chi0~-chi12~)(w_n)*(chi0-chi12)(w_n) * (K0-K2)(w_c)"},
      {{Sector::kPP, 1}, "P-P(beta)", "tm.PP.beta",
       "1/2*(chi0~+chi12~)(w_n)*(chi0+chi12)(w_n) * (K0+K2)(w_c)"},
      {{Sector::kPP, 2}, "P-P(gamma)", "tm.PP.gamma",
       "chi16~(w_n)*chi16(w_n) * (K1+K3)(w_c)"},
  };
  return reg;
}

const std::vector<CheckAnchor>& check_anchors() {
  static const std::vector<CheckAnchor> anchors = {
      {"charged.periodicity", "K_l(w_c+2|tau) = K_l(w_c|tau), l = 0..3"},
      {"charged.flux-step", "half-period flux map sends K_l to K_{l+1 mod 4}"},
      {"ising.acycle", "chi_0,1/2 invariant and chi_1/16 flips sign under w -> w+2"},
      {"flux.AP", "flux insertion swaps the two A-P blocks"},
      {"flux.AA", "flux insertion annihilates both A-A blocks"},
      {"flux.PA", "flux insertion annihilates both P-A blocks"},
      {"flux.PP-alpha", "flux insertion annihilates P-P(alpha)"},
      {"flux.PP-beta-gamma", "flux insertion exchanges P-P(beta) and P-P(gamma)"},
      {"monodromy.dichotomy", "A-cycle transport: untwisted +1, twisted -1"},
      {"monodromy.charged-only", "w_c-only transport is trivial for all blocks"},
      {"translations.commutator", "magnetic translation commutation phase e^{2 pi i M a b}"},
      {"lattice.classical-dichotomy", "even/odd closure: alternating chirality minima"},
      {"lattice.doublet", "quasi-degenerate ground doublet below the gap"},
      {"lattice.flux-gauge", "integer hole flux is a gauge transformation"},
      {"lattice.adiabatic-flip", "slow flux ramp flips the logical state"},
      {"lattice.double-kink", "double kink preserves the chirality sum at higher energy"},
      {"qubit.algebra", "two-level evolution, fit round trip, NOT involution"},
      {"qubit.register", "register spectra match tensor-sum oracles"},
  };
  return anchors;
}

bool known_anchor(const std::string& anchor) {
  for (const auto& e : character_registry())
    if (e.anchor == anchor) return true;
  for (const auto& a : check_anchors())
    if (a.anchor == anchor) return true;
  return false;
}

std::string registry_json() {
  std::ostringstream os;
  os << "{\n  \"characters\": [\n";
  const auto& reg = character_registry();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    os << "    {\"id\": \"" << reg[i].name << "\", \"sector\": \"" << to_string(reg[i].id.sector)
       << "\", \"anchor\": \"" << reg[i].anchor << "\", \"formula\": \"" << reg[i].formula
       << "\"}" << (i + 1 < reg.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"checks\": [\n";
  const auto& an = check_anchors();
  for (std::size_t i = 0; i < an.size(); ++i) {
    os << "    {\"anchor\": \"" << an[i].anchor << "\", \"description\": \"" << an[i].description
       << "\"}" << (i + 1 < an.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

namespace {

template <class R>
std::complex<double> run_tm(CharacterId id, std::complex<double> wn, std::complex<double> wc,
                            std::complex<double> tau, const SeriesControl& ctrl,
                            const CharOptions& opt) {
  detail::CharacterEngine<R> eng(tau, ctrl, opt);
  return to_std(eng.tm(id, from_std<R>(wn), from_std<R>(wc)));
}

}  // namespace

std::complex<double> ising_char(const IsingLabel& label, std::complex<double> w,
                                const TorusModulus& modulus, const SeriesControl& ctrl,
                                const CharOptions& opt) {
  ctrl.validate();
  IsingWeight wt = label.weight;  // barred copies evaluate identically
  if (ctrl.precision == Precision::kExtended) {
    detail::CharacterEngine<dd> eng(modulus.tau, ctrl, opt);
    return to_std(eng.ising(wt, from_std<dd>(w)));
  }
  detail::CharacterEngine<double> eng(modulus.tau, ctrl, opt);
  return to_std(eng.ising(wt, from_std<double>(w)));
}

std::complex<double> charged_char(const ChargedIndex& l, std::complex<double> w_c,
                                  const TorusModulus& modulus, const SeriesControl& ctrl) {
  ctrl.validate();
  if (ctrl.precision == Precision::kExtended) {
    detail::CharacterEngine<dd> eng(modulus.tau, ctrl);
    return to_std(eng.charged(l.wrapped(), from_std<dd>(w_c)));
  }
  detail::CharacterEngine<double> eng(modulus.tau, ctrl);
  return to_std(eng.charged(l.wrapped(), from_std<double>(w_c)));
}

std::complex<double> c32_block(int j, std::complex<double> w_c, const TorusModulus& modulus,
                               const SeriesControl& ctrl, const CharOptions& opt) {
  ctrl.validate();
  if (j < 0 || j > 2) throw std::invalid_argument("c32_block: j must be 0..2");
  if (ctrl.precision == Precision::kExtended) {
    detail::CharacterEngine<dd> eng(modulus.tau, ctrl, opt);
    return to_std(eng.c32(j, from_std<dd>(w_c)));
  }
  detail::CharacterEngine<double> eng(modulus.tau, ctrl, opt);
  return to_std(eng.c32(j, from_std<double>(w_c)));
}

std::complex<double> tm_character(CharacterId id, std::complex<double> w_n,
                                  std::complex<double> w_c, const TorusModulus& modulus,
                                  const SeriesControl& ctrl, const CharOptions& opt) {
  ctrl.validate();
  if (ctrl.precision == Precision::kExtended)
    return run_tm<dd>(id, w_n, w_c, modulus.tau, ctrl, opt);
  return run_tm<double>(id, w_n, w_c, modulus.tau, ctrl, opt);
}

std::complex<double> wavefunction(const std::vector<std::complex<double>>& positions,
                                  CharacterId id, const TorusModulus& modulus,
                                  const SeriesControl& ctrl, const CharOptions& opt) {
  ctrl.validate();
  if (positions.size() < 2) throw std::invalid_argument("wavefunction: need M >= 2 positions");
  const double m = static_cast<double>(positions.size());
  const std::complex<double> iunit{0.0, 1.0};

  std::complex<double> tp = theta1_prime0(modulus, ctrl);
  std::complex<double> jastrow{1.0, 0.0};
  double scale = std::abs(jacobi_theta(3, {0.0, 0.0}, modulus, ctrl));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      std::complex<double> t1 = jacobi_theta(1, positions[i] - positions[j], modulus, ctrl);
      if (std::abs(t1) < 1e-13 * scale)
        throw std::invalid_argument("wavefunction: coincident positions modulo the lattice");
      std::complex<double> r = t1 / tp;
      jastrow *= r * r * r * r;
    }
  }
  double ysq = 0.0;
  for (auto p : positions) {
    double y = p.imag() / modulus.tau.imag();
    ysq += y * y;
  }
  std::complex<double> gauss = std::exp(iunit * M_PI * m * modulus.tau * ysq);
  std::complex<double> omega{};
  for (auto p : positions) omega += p;
  return gauss * jastrow * tm_character(id, {0.0, 0.0}, omega, modulus, ctrl, opt);
}

}  // namespace jjl
