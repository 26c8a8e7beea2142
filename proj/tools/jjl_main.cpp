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

// Batch front-end for the ladder-qubit workbench.
//
// Verbs: verify-identities, monodromy, flux-table, ladder, classical-min,
// adiabatic, qubit.  All physics parameters live in the JSON config; the
// command line carries only --config/--out/--seed/--precision/--format.
// Exit codes: 0 pass, 1 verification failure, 2 configuration error,
// 3 numerical non-convergence.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jjl/characters.hpp"
#include "jjl/flux.hpp"
#include "jjl/lattice.hpp"
#include "jjl/modular.hpp"
#include "jjl/qubit.hpp"
#include "jjl/report.hpp"

using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* kDefaultConfig = R"json({
  "version": 1,
  "identity": {
    "samples": 24,
    "tau": [[0.0, 1.0], [0.0, 2.0], [0.5, 1.0], [0.0, 1.5]],
    "zero_threshold": 1e-8,
    "match_threshold": 1e-8,
    "aa1_k_minus": false
  },
  "monodromy": {
    "offsets": [1e-3, 1e-2],
    "max_deviation": 1e-6
  },
  "ladder": {
    "n_plaquettes": 3,
    "seam": "mobius_impurity",
    "ex": 1.0,
    "ey": 1.0,
    "ec": 0.1,
    "frustration": 0.5,
    "impurity_strength": 1.0,
    "n_max": 2,
    "n_tot": 0,
    "hole_flux": 0.0,
    "eigenpairs": 4,
    "doublet_ratio_max": 0.2,
    "require_alternation": false,
    "dump_eigenvectors": false
  },
  "classical": {
    "n_starts": 32
  },
  "adiabatic": {
    "n_plaquettes": 3,
    "ex": 0.5,
    "ey": 1.0,
    "ec": 0.08,
    "n_max": 2,
    "times": [3.0, 10.0, 40.0, 160.0],
    "sudden_time": 1e-6,
    "steps": 128,
    "min_flip": 0.9,
    "monotone_noise": 0.02,
    "gap_floor": 1e-3
  },
  "qubit": {
    "epsilon": 0.0,
    "delta": 0.5,
    "initial": [[1.0, 0.0], [0.0, 0.0]],
    "duration": 12.566370614359172,
    "samples": 64,
    "from_ladder": false,
    "register": {
      "qubits": 2,
      "epsilon": [0.0, 0.0],
      "delta": [0.3, 0.3],
      "couplings": [[0, 1, 0.5]],
      "duration": 8.0
    }
  },
  "fault_injection": {
    "k_index_offset": 0,
    "corrupt_registry": false
  }
})json";

// Fail-closed validation: every key present in `cfg` must exist in the
// schema (the default config doubles as the schema).
void check_keys(const json& cfg, const json& schema, const std::string& path) {
  if (!cfg.is_object()) return;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (!schema.is_object() || !schema.contains(it.key()))
      throw ConfigError("unknown config key: " + path + it.key());
    if (it->is_object()) check_keys(*it, schema.at(it.key()), path + it.key() + ".");
  }
}

json merge_defaults(const json& user, const json& defaults) {
  json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (it->is_object() && defaults.contains(it.key()) && defaults.at(it.key()).is_object())
      out[it.key()] = merge_defaults(*it, defaults.at(it.key()));
    else
      out[it.key()] = *it;
  }
  return out;
}

struct Args {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 12345;
  std::string precision = "double";
  std::string format = "text";
};

json load_config(const Args& args) {
  json defaults = json::parse(kDefaultConfig);
  json user = json::object();
  if (!args.config_path.empty()) {
    std::ifstream is(args.config_path);
    if (!is) throw ConfigError("cannot open config file " + args.config_path);
    try {
      user = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  check_keys(user, defaults, "");
  if (user.contains("version") && user["version"] != 1)
    throw ConfigError("unsupported config version");
  return merge_defaults(user, defaults);
}

jjl::SeriesControl make_ctrl(const Args& args) {
  jjl::SeriesControl ctrl;
  if (args.precision == "extended") {
    ctrl.precision = jjl::Precision::kExtended;
    ctrl.tail_tolerance = 1e-28;
  } else if (args.precision != "double") {
    throw ConfigError("precision must be 'double' or 'extended'");
  }
  return ctrl;
}

jjl::CharOptions make_char_options(const json& cfg) {
  jjl::CharOptions opt;
  opt.aa1_k_minus = cfg.at("identity").at("aa1_k_minus").get<bool>();
  opt.fault_registry = cfg.at("fault_injection").at("corrupt_registry").get<bool>();
  return opt;
}

std::vector<jjl::TorusModulus> tau_list(const json& cfg) {
  std::vector<jjl::TorusModulus> out;
  for (const auto& t : cfg.at("identity").at("tau"))
    out.push_back(jjl::TorusModulus{{t.at(0).get<double>(), t.at(1).get<double>()}});
  if (out.empty()) throw ConfigError("identity.tau must not be empty");
  return out;
}

jjl::LadderSpec ladder_from_json(const json& l) {
  jjl::LadderSpec spec;
  spec.n_plaquettes = l.at("n_plaquettes").get<int>();
  std::string seam = l.value("seam", "mobius_impurity");
  if (seam == "periodic") spec.seam = jjl::Seam::kPeriodic;
  else if (seam == "mobius_impurity") spec.seam = jjl::Seam::kMobiusImpurity;
  else throw ConfigError("ladder.seam must be 'periodic' or 'mobius_impurity'");
  spec.ex = l.at("ex").get<double>();
  spec.ey = l.at("ey").get<double>();
  spec.ec = l.at("ec").get<double>();
  spec.frustration = l.value("frustration", 0.5);
  spec.impurity_strength = l.value("impurity_strength", 1.0);
  spec.n_max = l.at("n_max").get<int>();
  spec.hole_flux = l.value("hole_flux", 0.0);
  spec.validate();
  return spec;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / name);
  os << content;
}

void emit(const jjl::VerificationReport& rep, const Args& args) {
  if (args.format == "json") std::cout << rep.to_json();
  else if (args.format == "csv") std::cout << rep.to_csv();
  else std::cout << rep.to_text();
  write_file(args.out_dir, "report.json", rep.to_json());
}

jjl::VerificationReport make_report(const std::string& command, const json& cfg,
                                    const Args& args) {
  jjl::VerificationReport rep;
  rep.command = command;
  rep.config_hash = jjl::config_hash_hex(cfg.dump());
  rep.seed = args.seed;
  rep.precision = args.precision;
  return rep;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// ---------------------------------------------------------------------------

int cmd_verify_identities(const json& cfg, const Args& args) {
  Timer timer;
  auto ctrl = make_ctrl(args);
  auto opt = make_char_options(cfg);
  auto thr = jjl::FluxThresholds::for_precision(ctrl.precision);
  thr.zero = cfg.at("identity").at("zero_threshold").get<double>();
  thr.match = cfg.at("identity").at("match_threshold").get<double>();
  const int nsamp = cfg.at("identity").at("samples").get<int>();
  const int k_offset = cfg.at("fault_injection").at("k_index_offset").get<int>();
  auto taus = tau_list(cfg);

  auto rep = make_report("verify-identities", cfg, args);

  // Charged periodicity and the half-period flux step.
  for (int l = 0; l < 4; ++l) {
    double worst_period = 0.0, worst_step = 0.0;
    int count = 0;
    for (const auto& tau : taus) {
      auto samples = jjl::default_wc_samples(tau, nsamp, args.seed + l);
      for (auto w : samples) {
        auto kl = jjl::charged_char({l}, w, tau, ctrl);
        auto klp = jjl::charged_char({l}, w + 2.0, tau, ctrl);
        worst_period = std::max(worst_period, std::abs(klp - kl) / std::abs(kl));
        auto [value, expected0] = jjl::flux_insert_charged({l}, w, tau, ctrl);
        auto expected = jjl::charged_char({l + 1 + k_offset}, w, tau, ctrl);
        worst_step = std::max(worst_step, std::abs(value - expected) / std::abs(expected));
        ++count;
      }
    }
    rep.add("K_" + std::to_string(l) + " periodicity in w_c -> w_c + 2", "charged.periodicity",
            worst_period < 1e-9, worst_period, count);
    rep.add("flux step K_" + std::to_string(l) + " -> K_" + std::to_string((l + 1) % 4),
            "charged.flux-step", worst_step < 1e-9, worst_step, count);
  }

  // Ising A-cycle transport factors.
  {
    double worst_even = 0.0, worst_twist = 0.0;
    for (const auto& tau : taus) {
      for (auto wt : {jjl::IsingWeight::kZero, jjl::IsingWeight::kHalf}) {
        auto a = jjl::ising_char({wt, false}, {2.0, 0.0}, tau, ctrl, opt);
        auto b = jjl::ising_char({wt, false}, {0.0, 0.0}, tau, ctrl, opt);
        worst_even = std::max(worst_even, std::abs(a / b - 1.0));
      }
      auto a = jjl::ising_char({jjl::IsingWeight::kSixteenth, false}, {2.0, 0.0}, tau, ctrl, opt);
      auto b = jjl::ising_char({jjl::IsingWeight::kSixteenth, false}, {0.0, 0.0}, tau, ctrl, opt);
      worst_twist = std::max(worst_twist, std::abs(a / b + 1.0));
    }
    rep.add("chi_0, chi_1/2 single-valued under w -> w + 2", "ising.acycle", worst_even < 1e-6,
            worst_even, static_cast<int>(2 * taus.size()));
    rep.add("chi_1/16 picks (-1) under w -> w + 2", "ising.acycle", worst_twist < 1e-6,
            worst_twist, static_cast<int>(taus.size()));
  }

  // The full sector table.
  for (auto id : jjl::all_character_ids()) {
    auto [ecls, etarget] = jjl::expected_flux_action(id);
    double worst = 0.0;
    bool ok = true;
    std::string note;
    for (const auto& tau : taus) {
      auto samples = jjl::default_wc_samples(tau, nsamp, args.seed + 31);
      try {
        auto r = jjl::flux_insert_full(id, tau, samples, ctrl, thr, opt);
        worst = std::max(worst, r.residual);
        if (r.cls != ecls || !(r.target == etarget)) {
          ok = false;
          note = "classified " + jjl::to_string(r.cls) +
                 (r.target ? " " + jjl::to_string(*r.target) : "");
        }
        if (r.constant_anomaly)
          note = "constant anomaly c = " + std::to_string(r.constant.real()) + "+" +
                 std::to_string(r.constant.imag()) + "i";
      } catch (const jjl::FluxClassificationError& e) {
        ok = false;
        for (const auto& row : e.rows) worst = std::max(worst, row.residual);
        note = "no matching block";
      }
    }
    std::string anchor =
        id.sector == jjl::Sector::kAP   ? "flux.AP"
        : id.sector == jjl::Sector::kAA ? "flux.AA"
        : id.sector == jjl::Sector::kPA ? "flux.PA"
        : (id.index == 0 ? "flux.PP-alpha" : "flux.PP-beta-gamma");
    rep.add("flux action of " + jjl::to_string(id), anchor, ok, worst,
            static_cast<int>(nsamp * taus.size()), note);
  }

  rep.wall_ms = timer.ms();
  emit(rep, args);
  if (!args.out_dir.empty()) {
    write_file(args.out_dir, "registry.json", jjl::registry_json());
    // Golden theta samples for downstream regression.
    std::vector<jjl::GoldenRow> rows;
    for (const auto& tau : taus) {
      auto samples = jjl::default_wc_samples(tau, 4, args.seed);
      for (auto w : samples)
        rows.push_back({w, tau.tau, jjl::jacobi_theta(3, w, tau, ctrl)});
    }
    write_file(args.out_dir, "theta3_golden.csv", jjl::golden_csv(rows));
  }
  return rep.pass() ? kExitPass : kExitFail;
}

int cmd_monodromy(const json& cfg, const Args& args) {
  Timer timer;
  auto ctrl = make_ctrl(args);
  auto opt = make_char_options(cfg);
  auto taus = tau_list(cfg);
  const double max_dev = cfg.at("monodromy").at("max_deviation").get<double>();
  std::vector<double> offsets;
  for (const auto& d : cfg.at("monodromy").at("offsets")) offsets.push_back(d.get<double>());

  auto rep = make_report("monodromy", cfg, args);
  for (auto id : jjl::all_character_ids()) {
    // gamma carries two twist fields, so its A-cycle phase is +1.
    double expected = jjl::is_twisted(id.sector) ? -1.0 : 1.0;
    double worst = 0.0;
    bool ok = true;
    for (const auto& tau : taus) {
      for (double d : offsets) {
        jjl::CharOptions o = opt;
        o.path_offset = d;
        auto m = jjl::monodromy_transport(id, tau, d, ctrl, o);
        worst = std::max(worst, m.deviation);
        if (!m.snapped || *m.snapped != expected) ok = false;
      }
    }
    ok = ok && worst < max_dev;
    rep.add("A-cycle transport of " + jjl::to_string(id) + " (expect " +
                (expected > 0 ? "+1" : "-1") + ")",
            "monodromy.dichotomy", ok, worst,
            static_cast<int>(taus.size() * offsets.size()));
  }
  {
    double worst = 0.0;
    bool ok = true;
    for (auto id : jjl::all_character_ids())
      for (const auto& tau : taus) {
        auto m = jjl::monodromy_charged_only(id, tau, ctrl, opt);
        worst = std::max(worst, m.deviation);
        if (!m.snapped || *m.snapped != 1.0) ok = false;
      }
    rep.add("charged-only transport is trivial for all blocks", "monodromy.charged-only", ok,
            worst, static_cast<int>(9 * taus.size()));
  }
  rep.wall_ms = timer.ms();
  emit(rep, args);
  return rep.pass() ? kExitPass : kExitFail;
}

int cmd_flux_table(const json& cfg, const Args& args) {
  Timer timer;
  auto ctrl = make_ctrl(args);
  auto opt = make_char_options(cfg);
  auto thr = jjl::FluxThresholds::for_precision(ctrl.precision);
  auto taus = tau_list(cfg);
  const int nsamp = cfg.at("identity").at("samples").get<int>();

  auto table = jjl::stability_report(taus, nsamp, args.seed, ctrl, thr, opt);
  auto rep = make_report("flux-table", cfg, args);
  for (const auto& row : table.rows) {
    std::string anchor =
        row.id.sector == jjl::Sector::kAP   ? "flux.AP"
        : row.id.sector == jjl::Sector::kAA ? "flux.AA"
        : row.id.sector == jjl::Sector::kPA ? "flux.PA"
        : (row.id.index == 0 ? "flux.PP-alpha" : "flux.PP-beta-gamma");
    std::ostringstream tau;
    tau << row.modulus.tau.real() << "+" << row.modulus.tau.imag() << "i";
    rep.add(jjl::to_string(row.id) + " at tau=" + tau.str() + " -> " + row.classification +
                (row.target ? " " + jjl::to_string(*row.target) : ""),
            anchor, row.expected_match, row.residual, nsamp,
            row.anomaly ? "constant anomaly" : "");
  }
  rep.add("classification is modulus-independent", "flux.AP", table.tau_independent, 0.0,
          static_cast<int>(taus.size()));
  rep.wall_ms = timer.ms();

  if (args.format == "text") std::cout << table.to_text();
  emit(rep, args);
  if (!args.out_dir.empty()) {
    // Per-sample residuals for the first modulus.
    std::ostringstream csv;
    csv << "block,re_w,im_w,residual\n";
    for (auto id : jjl::all_character_ids()) {
      std::vector<jjl::FluxSampleRow> rows;
      auto samples = jjl::default_wc_samples(taus[0], nsamp, args.seed);
      try {
        jjl::flux_insert_full(id, taus[0], samples, ctrl, thr, opt, &rows);
      } catch (const jjl::FluxClassificationError& e) {
        rows = e.rows;
      }
      for (const auto& r : rows)
        csv << jjl::to_string(id) << ',' << r.w_c.real() << ',' << r.w_c.imag() << ','
            << r.residual << "\n";
    }
    write_file(args.out_dir, "flux_samples.csv", csv.str());
  }
  return rep.pass() ? kExitPass : kExitFail;
}

int classical_checks(const jjl::LadderSpec& base, const json& cfg, const Args& args,
                     jjl::VerificationReport& rep) {
  jjl::MinimizeOptions mopts;
  mopts.n_starts = cfg.at("classical").at("n_starts").get<int>();
  mopts.seed = args.seed;

  // Even closure: two alternating minima, chirality sum zero.
  jjl::LadderSpec even = base;
  even.n_plaquettes = 4;
  even.seam = jjl::Seam::kPeriodic;
  even.ec = 0.0;
  auto re = jjl::classical_minimize(even, mopts);
  int ground_alt = 0;
  bool sums_zero = true;
  double e0 = re.minima.empty() ? 0.0 : re.minima[0].energy;
  for (const auto& m : re.minima) {
    if (m.energy > e0 + 1e-8) break;
    auto pat = jjl::chirality_classical(even, m);
    if (pat.alternating) ++ground_alt;
    if (pat.sum != 0) sums_zero = false;
  }
  rep.add("even closure: two alternating ground minima, sum 0", "lattice.classical-dichotomy",
          ground_alt == 2 && sums_zero, std::abs(ground_alt - 2.0), mopts.n_starts);

  // Odd closure with the crossed seam: sums -1 and +1.
  jjl::LadderSpec odd = base;
  odd.n_plaquettes = 3;
  odd.seam = jjl::Seam::kMobiusImpurity;
  odd.ec = 0.0;
  auto ro = jjl::classical_minimize(odd, mopts);
  std::vector<int> sums;
  double eo = ro.minima.empty() ? 0.0 : ro.minima[0].energy;
  for (const auto& m : ro.minima) {
    if (m.energy > eo + 1e-8) break;
    auto pat = jjl::chirality_classical(odd, m);
    if (pat.alternating) sums.push_back(pat.sum);
  }
  std::sort(sums.begin(), sums.end());
  bool odd_ok = sums == std::vector<int>{-1, 1};
  rep.add("odd crossed closure: alternating minima with sums -1 and +1",
          "lattice.classical-dichotomy", odd_ok, odd_ok ? 0.0 : 1.0, mopts.n_starts);

  // Odd periodic: no perfect alternation (parity obstruction).
  jjl::LadderSpec oddp = odd;
  oddp.seam = jjl::Seam::kPeriodic;
  auto rp = jjl::classical_minimize(oddp, mopts);
  bool none_alternating = true;
  for (const auto& m : rp.minima)
    if (jjl::chirality_classical(oddp, m).alternating) none_alternating = false;
  rep.add("odd periodic closure: no perfectly alternating minimum",
          "lattice.classical-dichotomy", none_alternating, none_alternating ? 0.0 : 1.0,
          mopts.n_starts);
  return re.dropped_starts + ro.dropped_starts + rp.dropped_starts;
}

int cmd_classical_min(const json& cfg, const Args& args) {
  Timer timer;
  auto rep = make_report("classical-min", cfg, args);
  auto spec = ladder_from_json(cfg.at("ladder"));
  classical_checks(spec, cfg, args, rep);

  jjl::MinimizeOptions mopts;
  mopts.n_starts = cfg.at("classical").at("n_starts").get<int>();
  mopts.seed = args.seed;
  jjl::LadderSpec cl = spec;
  cl.ec = 0.0;
  auto r = jjl::classical_minimize(cl, mopts);
  std::ostringstream table;
  table << "energy,chirality,sum,alternating\n";
  for (const auto& m : r.minima) {
    auto pat = jjl::chirality_classical(cl, m);
    table << std::setprecision(12) << m.energy << ",\"";
    for (std::size_t i = 0; i < pat.chi.size(); ++i)
      table << (i ? " " : "") << std::showpos << pat.chi[i] << std::noshowpos;
    table << "\"," << pat.sum << ',' << (pat.alternating ? 1 : 0) << "\n";
  }
  write_file(args.out_dir, "minima.csv", table.str());
  if (args.format == "text") std::cout << table.str();

  rep.wall_ms = timer.ms();
  emit(rep, args);
  return rep.pass() ? kExitPass : kExitFail;
}

int cmd_ladder(const json& cfg, const Args& args) {
  Timer timer;
  const auto& l = cfg.at("ladder");
  auto spec = ladder_from_json(l);
  if (l.at("require_alternation").get<bool>() && spec.n_plaquettes % 2 == 1 &&
      spec.seam == jjl::Seam::kPeriodic)
    throw ConfigError(
        "parity obstruction: an odd periodic ring admits no alternating pattern; "
        "use seam = mobius_impurity");

  auto rep = make_report("ladder", cfg, args);
  std::optional<int> n_tot;
  if (!l.at("n_tot").is_null()) n_tot = l.at("n_tot").get<int>();
  auto basis = jjl::ChargeBasis::build(spec.n_sites(), spec.n_max, n_tot);
  auto h = jjl::build_hamiltonian(spec, basis);
  rep.add("Hamiltonian hermiticity (exact entries)", "lattice.doublet", h.is_hermitian(0.0), 0.0,
          static_cast<int>(h.nonzeros()));

  int k = l.at("eigenpairs").get<int>();
  auto eigs = jjl::ground_spectrum(h, k, {args.seed, 1e-9, 350});
  double split = eigs[1].value - eigs[0].value;
  double gap = eigs[2].value - eigs[0].value;
  double ratio = split / gap;
  double ratio_max = l.at("doublet_ratio_max").get<double>();
  rep.add("quasi-degenerate doublet below the gap", "lattice.doublet", ratio < ratio_max, ratio,
          k, "(E2-E1)/(E3-E1)");

  // Integer hole flux is a gauge transformation.
  jjl::LadderSpec flux1 = spec;
  flux1.hole_flux = spec.hole_flux + 1.0;
  auto h1 = jjl::build_hamiltonian(flux1, basis);
  auto eigs1 = jjl::ground_spectrum(h1, k, {args.seed, 1e-9, 350});
  double worst = 0.0;
  for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(eigs[i].value - eigs1[i].value));
  rep.add("integer hole-flux spectrum invariance", "lattice.flux-gauge", worst < 1e-10, worst, k);

  // Logical recombination carries the chirality labels.
  auto x = jjl::chirality_sum_operator(spec, basis);
  std::string fit_note;
  try {
    auto fit = jjl::fit_effective(
        {eigs[0].value, eigs[1].value, eigs[2].value, eigs[0].vector, eigs[1].vector}, x);
    double x0 = std::real(fit.logical0.dot(x.apply(fit.logical0)));
    double x1 = std::real(fit.logical1.dot(x.apply(fit.logical1)));
    bool signs = x0 < 0.0 && x1 > 0.0;
    rep.add("logical recombinations carry opposite chirality sums", "lattice.doublet", signs,
            std::abs(x0 + x1), 2,
            "<X> = " + std::to_string(x0) + ", " + std::to_string(x1));
  } catch (const jjl::TwoLevelRejection& e) {
    rep.add("logical recombinations carry opposite chirality sums", "lattice.doublet", false,
            e.ratio, 2, "two-level approximation rejected");
  }

  classical_checks(spec, cfg, args, rep);

  if (!args.out_dir.empty()) {
    std::ostringstream spectra;
    spectra << "index,energy,residual\n" << std::setprecision(17);
    for (int i = 0; i < k; ++i)
      spectra << i + 1 << ',' << eigs[i].value << ',' << eigs[i].residual << "\n";
    write_file(args.out_dir, "spectra.csv", spectra.str());
    if (l.at("dump_eigenvectors").get<bool>()) {
      std::vector<Eigen::VectorXcd> vecs;
      for (const auto& e : eigs) vecs.push_back(e.vector);
      jjl::write_eigenvectors((std::filesystem::path(args.out_dir) / "eigvecs.jjlv").string(),
                              vecs);
    }
  }
  rep.wall_ms = timer.ms();
  emit(rep, args);
  return rep.pass() ? kExitPass : kExitFail;
}

int cmd_adiabatic(const json& cfg, const Args& args) {
  Timer timer;
  const auto& a = cfg.at("adiabatic");
  jjl::LadderSpec spec;
  spec.n_plaquettes = a.at("n_plaquettes").get<int>();
  spec.seam = jjl::Seam::kMobiusImpurity;
  spec.ex = a.at("ex").get<double>();
  spec.ey = a.at("ey").get<double>();
  spec.ec = a.at("ec").get<double>();
  spec.n_max = a.at("n_max").get<int>();
  spec.validate();

  auto rep = make_report("adiabatic", cfg, args);
  auto basis = jjl::ChargeBasis::build(spec.n_sites(), spec.n_max, 0);
  auto h = jjl::build_hamiltonian(spec, basis);
  auto eigs = jjl::ground_spectrum(h, 3, {args.seed, 1e-9, 350});
  auto x = jjl::chirality_sum_operator(spec, basis);
  auto fit = jjl::fit_effective(
      {eigs[0].value, eigs[1].value, eigs[2].value, eigs[0].vector, eigs[1].vector}, x);

  jjl::RampOptions ropts;
  ropts.steps = a.at("steps").get<int>();
  ropts.gap_floor = a.at("gap_floor").get<double>();
  ropts.seed = args.seed;

  // Sudden limit retains the initial state.
  jjl::RampOptions sudden = ropts;
  sudden.gap_checks = 0;
  auto rs = jjl::adiabatic_ramp(spec, basis, a.at("sudden_time").get<double>(), fit.logical0,
                                fit.logical0, fit.logical1, sudden);
  rep.add("sudden ramp retains the initial state", "lattice.adiabatic-flip",
          rs.fidelity_initial > 0.99, 1.0 - rs.fidelity_initial, 1);

  std::vector<double> times, flips;
  for (const auto& t : a.at("times")) times.push_back(t.get<double>());
  std::ostringstream csv;
  csv << "ramp_time,fidelity_flip,fidelity_stay,min_gap,steps\n";
  bool warn = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    jjl::RampOptions ro = ropts;
    ro.gap_checks = (i + 1 == times.size()) ? 5 : 0;
    auto r = jjl::adiabatic_ramp(spec, basis, times[i], fit.logical0, fit.logical0, fit.logical1,
                                 ro);
    flips.push_back(r.fidelity_flip);
    warn = warn || r.adiabaticity_warning;
    csv << times[i] << ',' << r.fidelity_flip << ',' << r.fidelity_stay << ',' << r.min_gap << ','
        << r.steps_used << "\n";
  }
  const double noise = a.at("monotone_noise").get<double>();
  bool monotone = true;
  for (std::size_t i = 1; i < flips.size(); ++i)
    if (flips[i] < flips[i - 1] - noise) monotone = false;
  rep.add("flip fidelity non-decreasing in ramp time", "lattice.adiabatic-flip", monotone,
          monotone ? 0.0 : 1.0, static_cast<int>(times.size()),
          warn ? "adiabaticity warning: small protection gap" : "");
  const double min_flip = a.at("min_flip").get<double>();
  rep.add("slow single-flux ramp flips the logical state", "lattice.adiabatic-flip",
          flips.back() > min_flip, 1.0 - flips.back(), 1,
          "flip fidelity " + std::to_string(flips.back()));

  write_file(args.out_dir, "ramp_fidelities.csv", csv.str());
  if (args.format == "text") std::cout << csv.str();
  rep.wall_ms = timer.ms();
  emit(rep, args);
  return rep.pass() ? kExitPass : kExitFail;
}

int cmd_qubit(const json& cfg, const Args& args) {
  Timer timer;
  const auto& q = cfg.at("qubit");
  auto rep = make_report("qubit", cfg, args);

  jjl::EffectiveParams params{q.at("epsilon").get<double>(), q.at("delta").get<double>()};
  if (q.at("from_ladder").get<bool>()) {
    auto spec = ladder_from_json(cfg.at("ladder"));
    auto basis = jjl::ChargeBasis::build(spec.n_sites(), spec.n_max, 0);
    auto h = jjl::build_hamiltonian(spec, basis);
    auto eigs = jjl::ground_spectrum(h, 3, {args.seed, 1e-9, 350});
    auto x = jjl::chirality_sum_operator(spec, basis);
    auto fit = jjl::fit_effective(
        {eigs[0].value, eigs[1].value, eigs[2].value, eigs[0].vector, eigs[1].vector}, x);
    params = fit.params;
  }

  jjl::QubitState psi{{q.at("initial").at(0).at(0).get<double>(),
                       q.at("initial").at(0).at(1).get<double>()},
                      {q.at("initial").at(1).at(0).get<double>(),
                       q.at("initial").at(1).at(1).get<double>()}};
  psi.check_normalized(1e-9);

  const double duration = q.at("duration").get<double>();
  const int samples = q.at("samples").get<int>();
  std::ostringstream traj;
  traj << "t,p0,p1,re_coh,im_coh\n" << std::setprecision(12);
  double worst_norm = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double t = duration * i / samples;
    auto s = jjl::evolve(params, psi, t);
    worst_norm = std::max(worst_norm, std::abs(s.norm() - 1.0));
    auto coh = s.alpha * std::conj(s.beta);
    traj << t << ',' << std::norm(s.alpha) << ',' << std::norm(s.beta) << ',' << coh.real() << ','
         << coh.imag() << "\n";
  }
  rep.add("two-level evolution preserves the norm", "qubit.algebra", worst_norm < 1e-12,
          worst_norm, samples + 1);

  // Register block.
  const auto& rj = q.at("register");
  jjl::RegisterSpec rspec;
  rspec.n_qubits = rj.at("qubits").get<int>();
  for (const auto& e : rj.at("epsilon")) rspec.epsilon.push_back(e.get<double>());
  for (const auto& d : rj.at("delta")) rspec.delta.push_back(d.get<double>());
  for (const auto& c : rj.at("couplings"))
    rspec.couplings.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>()});
  auto hreg = jjl::register_hamiltonian(rspec);
  Eigen::VectorXcd reg0 = Eigen::VectorXcd::Zero(1 << rspec.n_qubits);
  reg0[0] = 1.0;
  auto regT = jjl::register_evolve(hreg, reg0, rj.at("duration").get<double>());
  rep.add("register evolution preserves the norm", "qubit.register",
          std::abs(regT.norm() - 1.0) < 1e-10, std::abs(regT.norm() - 1.0), 1);
  if (rspec.n_qubits == 2 && !rspec.couplings.empty()) {
    double s = jjl::entanglement_entropy(regT, 2, 0);
    rep.add("coupled pair develops entanglement", "qubit.register", s > 1e-6, s, 1,
            "entropy " + std::to_string(s));
  }

  write_file(args.out_dir, "trajectory.csv", traj.str());
  if (args.format == "csv") std::cout << traj.str();
  rep.wall_ms = timer.ms();
  emit(rep, args);
  return rep.pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification workbench for the flux-protected ladder qubit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the verb

  Args args;
  app.add_option("--config", args.config_path, "JSON config file");
  app.add_option("--out", args.out_dir, "output directory for reports and data files");
  app.add_option("--seed", args.seed, "seed for every stochastic choice");
  app.add_option("--precision", args.precision, "double | extended")
      ->check(CLI::IsMember({"double", "extended"}));
  app.add_option("--format", args.format, "json | text | csv")
      ->check(CLI::IsMember({"json", "text", "csv"}));

  auto* verify = app.add_subcommand("verify-identities", "run the character identity suite");
  auto* monodromy = app.add_subcommand("monodromy", "A-cycle transport dichotomy");
  auto* flux = app.add_subcommand("flux-table", "sector stability classification table");
  auto* ladder = app.add_subcommand("ladder", "exact diagonalization of the closed ladder");
  auto* classical = app.add_subcommand("classical-min", "classical energy minimization");
  auto* adiabatic = app.add_subcommand("adiabatic", "adiabatic flux-ramp flip");
  auto* qubit = app.add_subcommand("qubit", "effective two-level model and register");

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = load_config(args);
    if (verify->parsed()) return cmd_verify_identities(cfg, args);
    if (monodromy->parsed()) return cmd_monodromy(cfg, args);
    if (flux->parsed()) return cmd_flux_table(cfg, args);
    if (ladder->parsed()) return cmd_ladder(cfg, args);
    if (classical->parsed()) return cmd_classical_min(cfg, args);
    if (adiabatic->parsed()) return cmd_adiabatic(cfg, args);
    if (qubit->parsed()) return cmd_qubit(cfg, args);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const jjl::ConvergenceError& e) {
    std::cerr << "numerical non-convergence: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const jjl::TruncationError& e) {
    std::cerr << "numerical non-convergence: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const jjl::TwoLevelRejection& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
