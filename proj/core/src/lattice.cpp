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

#include "jjl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

namespace jjl {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

std::vector<Link> ladder_links(const LadderSpec& spec) {
  spec.validate();
  const int n = spec.n_plaquettes;
  const double a_up = M_PI * spec.frustration;
  const double hole = 2.0 * M_PI * spec.hole_flux / n;
  auto site = [n](int leg, int j) { return leg * n + j; };

  // Both crossed seam links carry the extra phase xi = N pi f mod pi.  This
  // keeps the seam plaquette at flux 2 pi f while placing hole_flux = 0 at a
  // time-reversal-symmetric point, so the two chirality patterns stay
  // degenerate.  At f = 1/2 it makes one crossing junction a pi-junction.
  const bool mobius = spec.seam == Seam::kMobiusImpurity;
  const double xi = mobius ? std::fmod(n * M_PI * spec.frustration, M_PI) : 0.0;

  std::vector<Link> links;
  links.reserve(3 * n);
  for (int j = 0; j < n; ++j) {  // upper leg
    bool seam = (j == n - 1) && mobius;
    int to = seam ? site(1, 0) : site(0, (j + 1) % n);
    double e = spec.ex * (seam ? spec.impurity_strength : 1.0);
    links.push_back({site(0, j), to, e, a_up + hole + (seam ? xi : 0.0)});
  }
  for (int j = 0; j < n; ++j) {  // lower leg
    bool seam = (j == n - 1) && mobius;
    int to = seam ? site(0, 0) : site(1, (j + 1) % n);
    double e = spec.ex * (seam ? spec.impurity_strength : 1.0);
    links.push_back({site(1, j), to, e, -a_up + hole + (seam ? xi : 0.0)});
  }
  for (int j = 0; j < n; ++j)  // rungs
    links.push_back({site(0, j), site(1, j), spec.ey, 0.0});
  return links;
}

std::vector<Plaquette> ladder_plaquettes(const LadderSpec& spec) {
  const int n = spec.n_plaquettes;
  auto upper = [](int j) { return j; };
  auto lower = [n](int j) { return n + j; };
  auto rung = [n](int j) { return 2 * n + j; };

  std::vector<Plaquette> ps(n);
  for (int j = 0; j < n - 1; ++j)
    ps[j].edges = {{{upper(j), +1}, {rung(j + 1), +1}, {lower(j), -1}, {rung(j), -1}}};
  if (spec.seam == Seam::kMobiusImpurity) {
    // Crossed seam plaquette: (0,n-1) -> (1,0) -> (0,0) -> (1,n-1) -> (0,n-1).
    ps[n - 1].edges = {{{upper(n - 1), +1}, {rung(0), -1}, {lower(n - 1), -1}, {rung(n - 1), -1}}};
  } else {
    ps[n - 1].edges = {{{upper(n - 1), +1}, {rung(0), +1}, {lower(n - 1), -1}, {rung(n - 1), -1}}};
  }
  return ps;
}

ChargeBasis ChargeBasis::build(int n_sites, int n_max, std::optional<int> n_tot) {
  if (n_sites < 1 || n_sites > 16) throw std::invalid_argument("ChargeBasis: 1..16 sites");
  if (n_max < 1 || n_max > 7) throw std::invalid_argument("ChargeBasis: n_max in 1..7");
  ChargeBasis b;
  b.n_sites = n_sites;
  b.n_max = n_max;
  b.n_tot = n_tot;

  std::uint64_t state = 0;
  std::vector<int> charges(n_sites, -n_max);
  auto rec = [&](auto&& self, int site, int partial) -> void {
    if (site == n_sites) {
      if (!n_tot || partial == *n_tot) b.states.push_back(state);
      return;
    }
    int remaining = n_sites - site - 1;
    for (int q = -n_max; q <= n_max; ++q) {
      if (n_tot) {
        int rest = *n_tot - partial - q;
        if (std::abs(rest) > n_max * remaining) continue;
      }
      state |= static_cast<std::uint64_t>(q + n_max) << (4 * site);
      self(self, site + 1, partial + q);
      state &= ~(0xFULL << (4 * site));
    }
  };
  rec(rec, 0, 0);
  (void)charges;
  b.index.reserve(b.states.size() * 2);
  for (std::size_t i = 0; i < b.states.size(); ++i)
    b.index.emplace(b.states[i], static_cast<int>(i));
  return b;
}

std::optional<std::uint64_t> ChargeBasis::shifted(std::uint64_t state, int site, int delta) const {
  int q = charge(state, site) + delta;
  if (q < -n_max || q > n_max) return std::nullopt;
  std::uint64_t cleared = state & ~(0xFULL << (4 * site));
  return cleared | (static_cast<std::uint64_t>(q + n_max) << (4 * site));
}

bool SparseOperator::is_hermitian(double tol) const {
  Eigen::SparseMatrix<std::complex<double>> d = mat - Eigen::SparseMatrix<std::complex<double>>(
                                                          mat.adjoint());
  double worst = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (decltype(mat)::InnerIterator it(d, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst <= tol;
}

double SparseOperator::infinity_norm() const {
  std::vector<double> row(mat.rows(), 0.0);
  for (int k = 0; k < mat.outerSize(); ++k)
    for (decltype(mat)::InnerIterator it(mat, k); it; ++it) row[it.row()] += std::abs(it.value());
  return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
}

namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;

void add_hop_terms(std::vector<Triplet>& trips, const Link& link, const ChargeBasis& basis,
                   std::complex<double> raise_coeff, std::complex<double> lower_coeff) {
  // raise_coeff multiplies e^{i phi_from} e^{-i phi_to}, lower_coeff its adjoint.
  for (int col = 0; col < basis.dim(); ++col) {
    std::uint64_t s = basis.states[col];
    if (auto up = basis.shifted(s, link.from, +1)) {
      if (auto t = basis.shifted(*up, link.to, -1)) {
        auto it = basis.index.find(*t);
        if (it != basis.index.end()) trips.emplace_back(it->second, col, raise_coeff);
      }
    }
    if (auto dn = basis.shifted(s, link.from, -1)) {
      if (auto t = basis.shifted(*dn, link.to, +1)) {
        auto it = basis.index.find(*t);
        if (it != basis.index.end()) trips.emplace_back(it->second, col, lower_coeff);
      }
    }
  }
}

}  // namespace

SparseOperator build_from_links(std::span<const Link> links, double ec, const ChargeBasis& basis,
                                const BuildOptions& opts) {
  const int dim = basis.dim();
  std::size_t est = static_cast<std::size_t>(dim) * (1 + 2 * links.size());
  if (est > opts.max_nonzeros)
    throw std::invalid_argument("build_from_links: estimated nonzeros exceed cap");

  std::vector<Triplet> trips;
  trips.reserve(est);
  for (int col = 0; col < dim; ++col) {
    double nsq = 0.0;
    for (int s = 0; s < basis.n_sites; ++s) {
      double q = basis.charge(basis.states[col], s);
      nsq += q * q;
    }
    if (nsq != 0.0) trips.emplace_back(col, col, 0.5 * ec * nsq);
  }
  for (const auto& link : links) {
    std::complex<double> c = -0.5 * link.coupling * std::exp(-kI * link.gauge);
    add_hop_terms(trips, link, basis, c, std::conj(c));
  }
  SparseOperator op;
  op.mat.resize(dim, dim);
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.mat.makeCompressed();
  return op;
}

SparseOperator build_hamiltonian(const LadderSpec& spec, const ChargeBasis& basis,
                                 const BuildOptions& opts) {
  auto links = ladder_links(spec);
  return build_from_links(links, spec.ec, basis, opts);
}

SparseOperator link_current_operator(const Link& link, const ChargeBasis& basis) {
  // E sin(phi_i - phi_j - A) = -i E/2 [e^{-iA} hop(i->j) - e^{+iA} hop(j->i)]
  std::vector<Triplet> trips;
  std::complex<double> c = -kI * 0.5 * link.coupling * std::exp(-kI * link.gauge);
  add_hop_terms(trips, link, basis, c, std::conj(c));
  SparseOperator op;
  op.mat.resize(basis.dim(), basis.dim());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.mat.makeCompressed();
  return op;
}

SparseOperator chirality_sum_operator(const LadderSpec& spec, const ChargeBasis& basis) {
  auto links = ladder_links(spec);
  auto plaqs = ladder_plaquettes(spec);
  SparseOperator total;
  total.mat.resize(basis.dim(), basis.dim());
  for (const auto& p : plaqs) {
    for (auto [li, orient] : p.edges) {
      SparseOperator j = link_current_operator(links[li], basis);
      total.mat += static_cast<double>(orient) * j.mat;
    }
  }
  total.mat.makeCompressed();
  return total;
}

Eigen::VectorXcd integer_flux_gauge(const LadderSpec& spec, const ChargeBasis& basis, int quanta) {
  const int n = spec.n_plaquettes;
  Eigen::VectorXcd u(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    double phase = 0.0;
    for (int s = 0; s < basis.n_sites; ++s) {
      int j = s % n;  // rung index for either leg
      phase += 2.0 * M_PI * quanta * j / static_cast<double>(n) *
               basis.charge(basis.states[i], s);
    }
    u[i] = std::exp(kI * phase);
  }
  return u;
}

FluxStepMap flux_step_unitary(const LadderSpec& spec) {
  if (spec.seam != Seam::kMobiusImpurity)
    throw std::invalid_argument(
        "flux_step_unitary: the half-unit map exists only for the crossed seam");
  const int n = spec.n_plaquettes;
  const int ns = spec.n_sites();
  FluxStepMap map;
  map.site_perm.resize(ns);
  for (int leg = 0; leg < 2; ++leg)
    for (int j = 0; j < n; ++j)
      map.site_perm[leg * n + j] =
          (j + 1 < n) ? leg * n + (j + 1) : (1 - leg) * n;  // legs swap through the seam

  LadderSpec half = spec;
  half.hole_flux = spec.hole_flux + 0.5;
  auto links0 = ladder_links(spec);
  auto linksh = ladder_links(half);

  // Solve lambda from: gauge0(perm link) = gauge_half(link) + lambda_to - lambda_from.
  map.lambda = Eigen::VectorXd::Zero(ns);
  std::vector<bool> seen(ns, false);
  seen[map.site_perm[linksh[0].from]] = true;
  for (int pass = 0; pass <= ns; ++pass) {
    for (const auto& lh : linksh) {
      int f = map.site_perm[lh.from], t = map.site_perm[lh.to];
      double g0 = 0.0;
      int dir = 0;
      for (const auto& l0 : links0) {
        if (l0.from == f && l0.to == t) { g0 = l0.gauge; dir = +1; break; }
        if (l0.from == t && l0.to == f) { g0 = l0.gauge; dir = -1; break; }
      }
      if (dir == 0) throw std::logic_error("flux_step_unitary: translation is not a link map");
      double want = (dir > 0) ? g0 - lh.gauge : -g0 - lh.gauge;
      if (seen[f] && !seen[t]) {
        map.lambda[t] = map.lambda[f] + want;
        seen[t] = true;
      } else if (seen[t] && !seen[f]) {
        map.lambda[f] = map.lambda[t] - want;
        seen[f] = true;
      } else if (seen[f] && seen[t]) {
        if (std::fabs(std::remainder(map.lambda[t] - map.lambda[f] - want, 2.0 * M_PI)) > 1e-9)
          throw std::logic_error("flux_step_unitary: inconsistent gauge (seam phases changed?)");
      }
    }
  }
  return map;
}

Eigen::VectorXcd FluxStepMap::apply(const ChargeBasis& basis, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    std::uint64_t st = basis.states[i];
    std::uint64_t mapped = 0;
    double phase = 0.0;
    for (int s = 0; s < basis.n_sites; ++s) {
      int q = basis.charge(st, s);
      mapped |= static_cast<std::uint64_t>(q + basis.n_max) << (4 * site_perm[s]);
      phase += lambda[site_perm[s]] * q;
    }
    auto it = basis.index.find(mapped);
    if (it == basis.index.end()) throw std::logic_error("FluxStepMap: basis not closed");
    out[it->second] += std::exp(kI * phase) * v[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lanczos with full reorthogonalization.

namespace {

// One Lanczos pass with full reorthogonalization, deflated against `locked`.
std::vector<EigenPair> lanczos_run(const SparseOperator& h, int k, std::uint64_t seed, double tol,
                                   int max_basis, std::span<const EigenPair> locked) {
  const int n = h.dim();
  const double hnorm = std::max(h.infinity_norm(), 1e-300);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_vec = [&] {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = std::complex<double>(gauss(rng), gauss(rng));
    return v;
  };
  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha, beta;
  auto reorth = [&](Eigen::VectorXcd& w) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& l : locked) w -= l.vector.dot(w) * l.vector;
      for (const auto& u : basis) w -= u.dot(w) * u;
    }
  };

  Eigen::VectorXcd v = random_vec();
  reorth(v);
  v.normalize();
  basis.push_back(v);

  const int mmax = std::min(max_basis, n - static_cast<int>(locked.size()));
  double achieved = std::numeric_limits<double>::infinity();

  auto ritz_pairs = [&](int m) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    return es;
  };
  auto build_and_check = [&](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, int m,
                             int want) -> std::optional<std::vector<EigenPair>> {
    std::vector<EigenPair> out;
    achieved = 0.0;
    for (int i = 0; i < want; ++i) {
      Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
      for (int j = 0; j < m; ++j) x += es.eigenvectors()(j, i) * basis[j];
      x.normalize();
      double lambda = es.eigenvalues()(i);
      double res = (h.apply(x) - lambda * x).norm();
      achieved = std::max(achieved, res);
      // Deterministic phase: largest component real positive.
      int imax = 0;
      for (int j = 1; j < n; ++j)
        if (std::abs(x[j]) > std::abs(x[imax])) imax = j;
      std::complex<double> ph = x[imax] / std::abs(x[imax]);
      x /= ph;
      out.push_back({lambda, std::move(x), res});
    }
    if (achieved < tol * hnorm) return out;
    return std::nullopt;
  };

  for (int j = 0; j < mmax; ++j) {
    Eigen::VectorXcd w = h.apply(basis[j]);
    double a = std::real(basis[j].dot(w));
    alpha.push_back(a);
    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    reorth(w);
    double b = w.norm();
    int m = j + 1;
    int want = std::min(k, m);

    bool happy = b < 1e-10 * hnorm;
    bool last = (m == mmax);
    bool check = (m >= std::max(2 * k, 8) && m % 10 == 0) || last || happy;
    if (check && m >= 1) {
      auto es = ritz_pairs(m);
      bool promising = (want == k);
      for (int i = 0; i < want && promising && !happy && !last; ++i)
        if (std::abs(b * es.eigenvectors()(m - 1, i)) > 0.1 * tol * hnorm) promising = false;
      if (promising || last || happy) {
        if (auto out = build_and_check(es, m, want); out && (want == k || last || happy))
          return *out;
      }
      if (last) break;
    }
    if (happy) {
      // Invariant subspace: continue with a fresh direction.
      Eigen::VectorXcd f = random_vec();
      reorth(f);
      double fb = f.norm();
      if (fb < 1e-8) {
        auto es = ritz_pairs(m);
        if (auto out = build_and_check(es, m, want)) return *out;
        break;
      }
      basis.push_back(f / fb);
      beta.push_back(0.0);
    } else {
      basis.push_back(w / b);
      beta.push_back(b);
    }
  }
  throw ConvergenceError(achieved);
}

}  // namespace

std::vector<EigenPair> ground_spectrum(const SparseOperator& h, int k,
                                       const LanczosOptions& opts) {
  const int n = h.dim();
  if (k < 1) throw std::invalid_argument("ground_spectrum: k >= 1");
  if (k >= n) throw std::invalid_argument("ground_spectrum: k must be below the dimension");

  // A single Krylov sequence converges one copy per eigenspace; extra
  // deflated sweeps with fresh start vectors recover multiplicities.
  std::vector<EigenPair> found = lanczos_run(h, k, opts.seed, opts.tol, opts.max_basis, {});
  for (int sweep = 1; sweep <= 2; ++sweep) {
    if (static_cast<int>(found.size()) >= n) break;
    double kth = found[std::min<std::size_t>(k, found.size()) - 1].value;
    int extra = std::min(k, n - static_cast<int>(found.size()));
    if (extra < 1) break;
    std::vector<EigenPair> more;
    try {
      more = lanczos_run(h, extra, opts.seed + 101 * sweep, opts.tol, opts.max_basis, found);
    } catch (const ConvergenceError&) {
      break;  // nothing further resolvable below the locked set
    }
    double scale = std::max(1.0, h.infinity_norm());
    bool changed = false;
    for (auto& p : more) {
      if (p.value < kth - 1e-12 * scale) changed = true;
      found.push_back(std::move(p));
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    if (!changed) break;
  }
  if (static_cast<int>(found.size()) < k) throw ConvergenceError(0.0);
  found.resize(k);
  return found;
}

Eigen::VectorXcd expm_krylov(const SparseOperator& h, const Eigen::VectorXcd& v, double t,
                             double tol, int max_basis) {
  const double nv = v.norm();
  if (nv == 0.0 || t == 0.0) return v;
  const int n = h.dim();
  const int mmax = std::min(max_basis, n);

  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v / nv);
  auto reorth = [&](Eigen::VectorXcd& w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : basis) w -= u.dot(w) * u;
  };

  auto approx = [&](int m, double* err) {
    Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tm(i, i) = alpha[i];
      if (i + 1 < m) tm(i, i + 1) = tm(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tm);
    Eigen::VectorXcd phases(m);
    for (int i = 0; i < m; ++i) phases[i] = std::exp(-kI * t * es.eigenvalues()(i));
    Eigen::VectorXcd y =
        es.eigenvectors().cast<std::complex<double>>() *
        (phases.array() * es.eigenvectors().row(0).transpose().cast<std::complex<double>>().array())
            .matrix();
    *err = (m <= static_cast<int>(beta.size())) ? std::abs(beta[m - 1] * std::abs(y[m - 1])) * std::abs(t)
                                                : 0.0;
    return y;
  };

  for (int j = 0; j < mmax; ++j) {
    Eigen::VectorXcd w = h.apply(basis[j]);
    double a = std::real(basis[j].dot(w));
    alpha.push_back(a);
    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    reorth(w);
    double b = w.norm();
    beta.push_back(b);
    int m = j + 1;
    bool happy = b < 1e-13 * std::max(1.0, std::abs(a));
    if (happy || m == mmax || (m >= 8 && m % 4 == 0)) {
      double err = 0.0;
      Eigen::VectorXcd y = approx(m, &err);
      if (happy || err < tol || m == mmax) {
        if (!happy && err >= tol && m == mmax) {
          // Krylov space too small for this step: split the time.
          Eigen::VectorXcd half = expm_krylov(h, v, t / 2.0, tol, max_basis);
          return expm_krylov(h, half, t / 2.0, tol, max_basis);
        }
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
        for (int i = 0; i < m; ++i) out += y[i] * basis[i];
        return nv * out;
      }
    }
    if (b == 0.0) break;
    basis.push_back(w / b);
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  double err = 0.0;
  Eigen::VectorXcd y = approx(static_cast<int>(alpha.size()), &err);
  for (std::size_t i = 0; i < alpha.size(); ++i) out += y[i] * basis[i];
  return nv * out;
}

// ---------------------------------------------------------------------------
// Classical limit.

namespace {

double energy_links(const std::vector<Link>& links, const Eigen::VectorXd& phi) {
  double e = 0.0;
  for (const auto& l : links) e -= l.coupling * std::cos(phi[l.from] - phi[l.to] - l.gauge);
  return e;
}

void grad_links(const std::vector<Link>& links, const Eigen::VectorXd& phi, Eigen::VectorXd& g) {
  g.setZero();
  for (const auto& l : links) {
    double s = l.coupling * std::sin(phi[l.from] - phi[l.to] - l.gauge);
    g[l.from] += s;
    g[l.to] -= s;
  }
}

void hess_links(const std::vector<Link>& links, const Eigen::VectorXd& phi, Eigen::MatrixXd& h) {
  h.setZero();
  for (const auto& l : links) {
    double c = l.coupling * std::cos(phi[l.from] - phi[l.to] - l.gauge);
    h(l.from, l.from) += c;
    h(l.to, l.to) += c;
    h(l.from, l.to) -= c;
    h(l.to, l.from) -= c;
  }
}

double wrap_two_pi(double x) {
  double y = std::fmod(x, 2.0 * M_PI);
  return y < 0.0 ? y + 2.0 * M_PI : y;
}

double wrap_pm_pi(double x) {
  double y = std::fmod(x + M_PI, 2.0 * M_PI);
  if (y < 0.0) y += 2.0 * M_PI;
  return y - M_PI;
}

Eigen::VectorXd canonical_phases(const Eigen::VectorXd& phi) {
  Eigen::VectorXd c(phi.size());
  for (int i = 0; i < phi.size(); ++i) c[i] = wrap_two_pi(phi[i] - phi[0]);
  return c;
}

bool same_configuration(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i)
    if (std::abs(wrap_pm_pi(a[i] - b[i])) > 1e-5) return false;
  return true;
}

// Gradient descent with backtracking, then Levenberg-polished Newton with
// the global phase pinned.  Returns true on ||grad||_inf < tol.
bool relax(const std::vector<Link>& links, Eigen::VectorXd& phi, double grad_tol,
           int max_descent, int max_newton) {
  const int n = static_cast<int>(phi.size());
  Eigen::VectorXd g(n), trial(n);
  double step = 0.1;
  double e = energy_links(links, phi);
  for (int it = 0; it < max_descent; ++it) {
    grad_links(links, phi, g);
    if (g.lpNorm<Eigen::Infinity>() < 1e-6) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      trial = phi - step * g;
      double et = energy_links(links, trial);
      if (et < e - 0.25 * step * g.squaredNorm()) {
        phi = trial;
        e = et;
        step *= 1.6;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }

  Eigen::MatrixXd h(n, n);
  double lambda = 1e-9;
  for (int it = 0; it < max_newton; ++it) {
    grad_links(links, phi, g);
    if (g.lpNorm<Eigen::Infinity>() < grad_tol) return true;
    hess_links(links, phi, h);
    Eigen::MatrixXd hr = h.bottomRightCorner(n - 1, n - 1);
    Eigen::VectorXd gr = g.tail(n - 1);
    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd m = hr + lambda * Eigen::MatrixXd::Identity(n - 1, n - 1);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
      if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd dp = ldlt.solve(gr);
        trial = phi;
        trial.tail(n - 1) -= dp;
        double et = energy_links(links, trial);
        if (et <= e + 1e-14 * std::abs(e)) {
          phi = trial;
          e = et;
          lambda = std::max(lambda / 3.0, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) return false;
  }
  grad_links(links, phi, g);
  return g.lpNorm<Eigen::Infinity>() < grad_tol;
}

bool is_local_minimum(const std::vector<Link>& links, const Eigen::VectorXd& phi) {
  const int n = static_cast<int>(phi.size());
  Eigen::MatrixXd h(n, n);
  hess_links(links, phi, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.bottomRightCorner(n - 1, n - 1));
  double scale = 0.0;
  for (const auto& l : links) scale = std::max(scale, l.coupling);
  return es.eigenvalues().minCoeff() > -1e-7 * scale;
}

}  // namespace

double classical_energy(const LadderSpec& spec, const Eigen::VectorXd& phases) {
  auto links = ladder_links(spec);
  return energy_links(links, phases);
}

MinimizeResult classical_minimize(const LadderSpec& spec, const MinimizeOptions& opts) {
  if (opts.n_starts < 8) throw std::invalid_argument("classical_minimize: n_starts >= 8");
  auto links = ladder_links(spec);
  const int n = spec.n_sites();

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);

  MinimizeResult result;
  for (int s = 0; s < opts.n_starts; ++s) {
    Eigen::VectorXd phi(n);
    for (int i = 0; i < n; ++i) phi[i] = uni(rng);
    if (!relax(links, phi, opts.grad_tol, opts.max_descent_iters, opts.max_newton_iters) ||
        !is_local_minimum(links, phi)) {
      ++result.dropped_starts;
      continue;
    }
    Eigen::VectorXd canon = canonical_phases(phi);
    double e = energy_links(links, canon);
    bool known = false;
    for (const auto& m : result.minima)
      if (std::abs(m.energy - e) < 1e-8 && same_configuration(m.phases, canon)) {
        known = true;
        break;
      }
    if (!known) result.minima.push_back({canon, e});
  }
  std::sort(result.minima.begin(), result.minima.end(), [](const auto& a, const auto& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return std::lexicographical_compare(a.phases.begin(), a.phases.end(), b.phases.begin(),
                                        b.phases.end());
  });
  return result;
}

namespace {

ChiralityPattern pattern_from_circulation(const LadderSpec& spec, std::vector<double> circ,
                                          double tol) {
  ChiralityPattern p;
  p.circulation = std::move(circ);
  const int n = spec.n_plaquettes;
  p.chi.resize(n);
  for (int q = 0; q < n; ++q)
    p.chi[q] = (std::abs(p.circulation[q]) < tol) ? 0 : (p.circulation[q] > 0 ? 1 : -1);
  p.sum = std::accumulate(p.chi.begin(), p.chi.end(), 0);
  p.alternating = true;
  for (int q = 0; q < n; ++q)
    if (p.chi[q] == 0) p.alternating = false;
  for (int q = 0; q + 1 < n && p.alternating; ++q)
    if (p.chi[q + 1] != -p.chi[q]) p.alternating = false;
  if (p.alternating) {
    // Seam wrap: the crossed seam identifies chiralities without a flip.
    if (spec.seam == Seam::kMobiusImpurity) {
      if (p.chi[0] != p.chi[n - 1]) p.alternating = false;
    } else {
      if (p.chi[0] != -p.chi[n - 1]) p.alternating = false;
    }
  }
  return p;
}

}  // namespace

ChiralityPattern chirality_classical(const LadderSpec& spec, const PhaseConfiguration& config,
                                     double tol_fraction) {
  auto links = ladder_links(spec);
  auto plaqs = ladder_plaquettes(spec);
  double emax = 0.0;
  for (const auto& l : links) emax = std::max(emax, l.coupling);
  std::vector<double> current(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    current[i] = l.coupling * std::sin(config.phases[l.from] - config.phases[l.to] - l.gauge);
  }
  std::vector<double> circ(plaqs.size(), 0.0);
  for (std::size_t q = 0; q < plaqs.size(); ++q)
    for (auto [li, orient] : plaqs[q].edges) circ[q] += orient * current[li];
  return pattern_from_circulation(spec, std::move(circ), tol_fraction * emax);
}

ChiralityPattern chirality_quantum(const LadderSpec& spec, const ChargeBasis& basis,
                                   const Eigen::VectorXcd& state, double tol_fraction) {
  auto links = ladder_links(spec);
  auto plaqs = ladder_plaquettes(spec);
  double emax = 0.0;
  for (const auto& l : links) emax = std::max(emax, l.coupling);
  std::vector<double> current(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    SparseOperator j = link_current_operator(links[i], basis);
    current[i] = std::real(state.dot(j.apply(state)));
  }
  std::vector<double> circ(plaqs.size(), 0.0);
  for (std::size_t q = 0; q < plaqs.size(); ++q)
    for (auto [li, orient] : plaqs[q].edges) circ[q] += orient * current[li];
  return pattern_from_circulation(spec, std::move(circ), tol_fraction * emax);
}

// ---------------------------------------------------------------------------
// Adiabatic flux ramp.

namespace {

struct RampRun {
  Eigen::VectorXcd state;
  double min_gap;
};

RampRun run_ramp(const LadderSpec& spec, const ChargeBasis& basis, double total_time, int steps,
                 const Eigen::VectorXcd& initial, const RampOptions& opts, bool track_gap) {
  Eigen::VectorXcd psi = initial;
  const double dt = total_time / steps;
  double min_gap = std::numeric_limits<double>::infinity();
  int next_check = 0;
  for (int s = 0; s < steps; ++s) {
    double frac = (s + 0.5) / steps;
    LadderSpec sp = spec;
    sp.hole_flux = opts.flux_span * 0.5 * (1.0 - std::cos(M_PI * frac));
    SparseOperator h = build_hamiltonian(sp, basis);
    // Protection gap of the ridden ground branch, probed away from the
    // endpoint degeneracies.
    if (track_gap && opts.gap_checks > 0 && frac > 0.1 && frac < 0.9 &&
        s * opts.gap_checks >= next_check * steps) {
      ++next_check;
      auto low = ground_spectrum(h, 2, {opts.seed, 1e-7, 350});
      min_gap = std::min(min_gap, low[1].value - low[0].value);
    }
    psi = expm_krylov(h, psi, dt, opts.krylov_tol);
  }
  return {psi, min_gap};
}

}  // namespace

RampResult adiabatic_ramp(const LadderSpec& spec, const ChargeBasis& basis, double total_time,
                          const Eigen::VectorXcd& initial, const Eigen::VectorXcd& logical0,
                          const Eigen::VectorXcd& logical1, const RampOptions& opts) {
  if (spec.hole_flux != 0.0)
    throw std::invalid_argument("adiabatic_ramp: start from hole_flux = 0");

  const bool half_step = std::abs(opts.flux_span - 0.5) < 1e-12;
  const double int_quanta = std::round(opts.flux_span);
  if (!half_step && std::abs(opts.flux_span - int_quanta) > 1e-12)
    throw std::invalid_argument("adiabatic_ramp: flux_span must be 0.5 or an integer");

  // Pull the final state back into the hole_flux = 0 frame, where the
  // logical basis lives.
  std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> pull_back;
  if (half_step) {
    FluxStepMap map = flux_step_unitary(spec);
    pull_back = [map, &basis](const Eigen::VectorXcd& v) { return map.apply(basis, v); };
  } else {
    Eigen::VectorXcd u = integer_flux_gauge(spec, basis, static_cast<int>(int_quanta));
    pull_back = [u](const Eigen::VectorXcd& v) {
      return Eigen::VectorXcd(u.conjugate().asDiagonal() * v);
    };
  }
  auto fidelities = [&](const Eigen::VectorXcd& psi, RampResult& r) {
    Eigen::VectorXcd back = pull_back(psi);
    r.fidelity_stay = std::norm(logical0.dot(back));
    r.fidelity_flip = std::norm(logical1.dot(back));
    r.fidelity_initial = std::norm(initial.dot(psi));
  };

  RampResult result;
  int steps = opts.steps;
  RampRun run = run_ramp(spec, basis, total_time, steps, initial, opts, true);
  fidelities(run.state, result);
  result.min_gap = run.min_gap;
  result.halving_converged = false;
  for (int h = 0; h < opts.max_halvings; ++h) {
    RampRun finer = run_ramp(spec, basis, total_time, steps * 2, initial, opts, false);
    RampResult fr;
    fidelities(finer.state, fr);
    double delta = std::max(std::abs(fr.fidelity_flip - result.fidelity_flip),
                            std::abs(fr.fidelity_stay - result.fidelity_stay));
    steps *= 2;
    run = finer;
    result.fidelity_flip = fr.fidelity_flip;
    result.fidelity_stay = fr.fidelity_stay;
    result.fidelity_initial = fr.fidelity_initial;
    if (delta < opts.halving_tol) {
      result.halving_converged = true;
      break;
    }
  }
  result.final_state = run.state;
  result.steps_used = steps;
  result.adiabaticity_warning = result.min_gap < opts.gap_floor;
  return result;
}

// ---------------------------------------------------------------------------
// Double kink.

namespace {

double penalty_energy(const std::vector<Link>& links, const std::vector<Plaquette>& plaqs,
                      const std::vector<int>& target, double margin, double mu,
                      const Eigen::VectorXd& phi, Eigen::VectorXd* grad) {
  double e = energy_links(links, phi);
  if (grad) grad_links(links, phi, *grad);
  std::vector<double> current(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    current[i] = l.coupling * std::sin(phi[l.from] - phi[l.to] - l.gauge);
  }
  for (std::size_t q = 0; q < plaqs.size(); ++q) {
    double circ = 0.0;
    for (auto [li, orient] : plaqs[q].edges) circ += orient * current[li];
    double gap = margin - target[q] * circ;
    if (gap > 0.0) {
      e += mu * gap * gap;
      if (grad) {
        for (auto [li, orient] : plaqs[q].edges) {
          const auto& l = links[li];
          double dcur = l.coupling * std::cos(phi[l.from] - phi[l.to] - l.gauge);
          double coeff = -2.0 * mu * gap * target[q] * orient * dcur;
          (*grad)[l.from] += coeff;
          (*grad)[l.to] -= coeff;
        }
      }
    }
  }
  return e;
}

void descend_penalty(const std::vector<Link>& links, const std::vector<Plaquette>& plaqs,
                     const std::vector<int>& target, double margin, double mu,
                     Eigen::VectorXd& phi, int iters) {
  Eigen::VectorXd g(phi.size()), trial(phi.size());
  double step = 0.05;
  double e = penalty_energy(links, plaqs, target, margin, mu, phi, &g);
  for (int it = 0; it < iters; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-8) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      trial = phi - step * g;
      double et = penalty_energy(links, plaqs, target, margin, mu, trial, nullptr);
      if (et < e) {
        phi = trial;
        Eigen::VectorXd gnew(phi.size());
        e = penalty_energy(links, plaqs, target, margin, mu, phi, &gnew);
        g = gnew;
        step *= 1.5;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
}

}  // namespace

KinkResult double_kink(const LadderSpec& spec, const PhaseConfiguration& base, int p,
                       const MinimizeOptions& opts) {
  auto links = ladder_links(spec);
  auto plaqs = ladder_plaquettes(spec);
  const int n = spec.n_plaquettes;
  if (p < 0 || p >= n) throw std::invalid_argument("double_kink: plaquette index out of range");

  ChiralityPattern basepat = chirality_classical(spec, base);
  std::vector<int> target = basepat.chi;
  std::swap(target[p], target[(p + 1) % n]);

  double margin = std::numeric_limits<double>::infinity();
  for (double c : basepat.circulation) margin = std::min(margin, std::abs(c));
  margin *= 0.4;
  double emax = 0.0;
  for (const auto& l : links) emax = std::max(emax, l.coupling);

  std::mt19937_64 rng(opts.seed + 17);
  std::normal_distribution<double> gauss(0.0, 0.4);

  KinkResult constrained_best;
  bool have_constrained = false;
  for (int attempt = 0; attempt < 6; ++attempt) {
    // Seed: translate the shared column by one plaquette (the exchanged pair
    // is a one-plaquette translation of the segment between the two walls).
    Eigen::VectorXd phi = base.phases;
    int col = (p + 1) % n;
    phi[col] = base.phases[p];
    phi[n + col] = base.phases[n + p];
    if (attempt > 0) {
      for (int c : {p, col, (p + 2) % n}) {
        phi[c] += gauss(rng);
        phi[n + c] += gauss(rng);
      }
    }
    descend_penalty(links, plaqs, target, margin, 3.0 * emax, phi, 20000);
    PhaseConfiguration cons{canonical_phases(phi), energy_links(links, phi)};
    ChiralityPattern conspat = chirality_classical(spec, cons);
    if (conspat.chi == target && !have_constrained) {
      constrained_best = {cons, conspat, false};
      have_constrained = true;
    }
    // Release the constraint: a pinned kink survives as a free minimum.
    Eigen::VectorXd free_phi = phi;
    if (!relax(links, free_phi, opts.grad_tol, opts.max_descent_iters, opts.max_newton_iters))
      continue;
    if (!is_local_minimum(links, free_phi)) continue;
    PhaseConfiguration cfg{canonical_phases(free_phi), 0.0};
    cfg.energy = energy_links(links, cfg.phases);
    ChiralityPattern pat = chirality_classical(spec, cfg);
    if (pat.chi == target) return {cfg, pat, true};
  }

  // The free kink unwinds at these couplings: report the constrained
  // configuration (if any) as the unstable-kink outcome.
  if (have_constrained) return constrained_best;
  return {base, basepat, false};
}

// ---------------------------------------------------------------------------
// Eigenvector binary layout.

void write_eigenvectors(const std::string& path, const std::vector<Eigen::VectorXcd>& vecs) {
  if (vecs.empty()) throw std::invalid_argument("write_eigenvectors: empty list");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_eigenvectors: cannot open " + path);
  os.write("JJLV1", 5);
  std::uint64_t dim = static_cast<std::uint64_t>(vecs[0].size());
  std::uint32_t count = static_cast<std::uint32_t>(vecs.size());
  os.write(reinterpret_cast<const char*>(&dim), 8);
  os.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& v : vecs) {
    if (static_cast<std::uint64_t>(v.size()) != dim)
      throw std::invalid_argument("write_eigenvectors: inconsistent dimensions");
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      double re = v[i].real(), im = v[i].imag();
      os.write(reinterpret_cast<const char*>(&re), 8);
      os.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
}

std::vector<Eigen::VectorXcd> read_eigenvectors(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_eigenvectors: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (std::memcmp(magic, "JJLV1", 5) != 0)
    throw std::runtime_error("read_eigenvectors: bad magic");
  std::uint64_t dim = 0;
  std::uint32_t count = 0;
  is.read(reinterpret_cast<char*>(&dim), 8);
  is.read(reinterpret_cast<char*>(&count), 4);
  std::vector<Eigen::VectorXcd> vecs(count, Eigen::VectorXcd(dim));
  for (auto& v : vecs)
    for (std::uint64_t i = 0; i < dim; ++i) {
      double re = 0.0, im = 0.0;
      is.read(reinterpret_cast<char*>(&re), 8);
      is.read(reinterpret_cast<char*>(&im), 8);
      v[i] = {re, im};
    }
  if (!is) throw std::runtime_error("read_eigenvectors: truncated file");
  return vecs;
}

}  // namespace jjl
