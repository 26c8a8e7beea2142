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

// Numerical substrate: Dedekind eta, theta functions with characteristics,
// the four Jacobi thetas, and branch-tracked square roots along paths.
//
// Evaluation strategy for Theta[a;b](z|T):
//   1. reduce z by quarter periods of T (exact identity, shifts a by k/4),
//   2. reduce Re z by integers (exact phase e^{2 pi i m a}),
//   3. sum the series at the reduced argument.
// For half-integer characteristics the series is summed in reflection-paired
// trigonometric form; the sin-form terms vanish identically at a reduced
// argument of exactly zero, so lattice zeros of theta evaluate to an exact
// floating-point 0.  Downstream cancellation checks rely on this.

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jjl/cx.hpp"
#include "jjl/dd.hpp"

namespace jjl {

enum class Precision { kDouble, kExtended };

struct TruncationError : std::runtime_error {
  double achieved_bound;
  explicit TruncationError(double bound)
      : std::runtime_error("series truncation bound not reached, achieved " +
                           std::to_string(bound)),
        achieved_bound(bound) {}
};

struct ZeroOnPathError : std::runtime_error {
  std::complex<double> location;
  explicit ZeroOnPathError(std::complex<double> loc)
      : std::runtime_error("function vanishes within resolution on the tracking path"),
        location(loc) {}
};

struct TorusModulus {
  std::complex<double> tau;

  explicit TorusModulus(std::complex<double> t) : tau(t) {
    if (!(t.imag() > 0.0)) throw std::invalid_argument("TorusModulus: Im tau must be > 0");
  }
  std::complex<double> nome() const {
    return std::exp(std::complex<double>(0.0, 2.0 * M_PI) * tau);
  }
};

struct TorusPoint {
  std::complex<double> w;
  TorusModulus modulus;
  double w_max_factor = 4.0;  // guard: |Im w| <= w_max_factor * Im tau

  TorusPoint(std::complex<double> w_, TorusModulus m, double guard = 4.0)
      : w(w_), modulus(m), w_max_factor(guard) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw std::invalid_argument("TorusPoint: w must be finite");
    if (std::abs(w.imag()) > w_max_factor * modulus.tau.imag())
      throw std::domain_error("TorusPoint: |Im w| exceeds overflow guard");
  }
};

struct Rational {
  int num = 0;
  int den = 1;
  double value() const { return static_cast<double>(num) / den; }
};

struct ThetaCharacteristic {
  Rational a;
  Rational b;

  ThetaCharacteristic(Rational a_, Rational b_) : a(a_), b(b_) {
    auto ok = [](const Rational& r) {
      return r.den == 1 || r.den == 2 || r.den == 4 || r.den == 8;
    };
    if (!ok(a) || !ok(b))
      throw std::invalid_argument("ThetaCharacteristic: denominators must divide 8");
  }
  int a8() const { return a.num * (8 / a.den); }
  int b8() const { return b.num * (8 / b.den); }
};

struct SeriesControl {
  double tail_tolerance = 1e-14;  // absolute bound on the truncated tail
  int max_terms = 256;
  Precision precision = Precision::kDouble;
  bool exact_theta1_prime = true;  // term-by-term derivative vs finite difference
  double im_guard_factor = 4.0;    // |Im z| <= factor * Im T

  void validate() const {
    if (!(tail_tolerance > 0.0)) throw std::invalid_argument("tail_tolerance must be > 0");
    if (max_terms < 16) throw std::invalid_argument("max_terms must be >= 16");
  }
};

struct ComplexPath {
  std::vector<std::complex<double>> waypoints;
  double max_arg_step = M_PI / 8.0;
  // Mandatory spatial resolution before adaptive refinement.  The argument
  // criterion alone cannot see a full 2 pi wrap inside one step, so steps
  // must stay below a quarter of the zero spacing of the tracked function.
  double initial_step = 0.25;

  void validate() const {
    if (waypoints.size() < 2) throw std::invalid_argument("ComplexPath: need >= 2 waypoints");
    for (std::size_t i = 1; i < waypoints.size(); ++i)
      if (waypoints[i] == waypoints[i - 1])
        throw std::invalid_argument("ComplexPath: consecutive waypoints must differ");
    if (!(max_arg_step > 0.0 && max_arg_step <= M_PI / 4.0))
      throw std::invalid_argument("ComplexPath: argument step bound must be in (0, pi/4]");
    if (!(initial_step > 0.0)) throw std::invalid_argument("ComplexPath: initial_step must be > 0");
  }
};

struct TrackedSqrtResult {
  std::complex<double> value;  // analytic continuation of sqrt(f) at path end
  double winding;              // total change of arg f along the path, divided by 2
  bool terminal_zero = false;  // f vanished exactly at the final waypoint
  int samples = 0;
};

namespace detail {

// ---------------------------------------------------------------------------
// Templated evaluation core, instantiated for double and dd.

template <class R>
struct Engine {
  using C = cx<R>;

  static R pi() {
    if constexpr (std::is_same_v<R, dd>) return dd_const::pi;
    else return M_PI;
  }
  static R eps() {
    if constexpr (std::is_same_v<R, dd>) return R(dd_const::eps);
    else return R(2.3e-16);
  }

  // Dedekind eta: q^{1/24} prod (1 - q^n), q = exp(2 pi i tau).
  static C eta(C tau, const SeriesControl& ctrl) {
    const C itwopi{R(0.0), R(2.0) * pi()};
    C q = jjl::exp(itwopi * tau);
    C pref = jjl::exp(itwopi * tau / R(24.0));
    C prod{R(1.0), R(0.0)};
    C qn{R(1.0), R(0.0)};
    double cut = std::max(to_double(eps()) * 0.25, ctrl.tail_tolerance * 1e-3);
    int n = 0;
    double mag = 1.0;
    while (n < ctrl.max_terms) {
      qn = qn * q;
      ++n;
      prod = prod * (C{R(1.0), R(0.0)} - qn);
      mag = to_double(jjl::abs(qn));
      if (mag < cut) break;
    }
    if (mag >= ctrl.tail_tolerance) throw TruncationError(mag);
    return pref * prod;
  }

  // Theta with characteristics, eighth-integer a and b in {0, 1/2}
  // (general b falls back to the generic sum).
  static C theta(int a8, int b8, C z, C T, const SeriesControl& ctrl) {
    const R kPi = pi();
    const C iunit{R(0.0), R(1.0)};
    R imT = T.im;

    // Quarter-period reduction along T.
    long k = std::lround(4.0 * to_double(z.im) / to_double(imT));
    C logpref{};
    if (k != 0) {
      R c = R(static_cast<double>(k)) / R(4.0);
      z = z - c * T;
      // -i pi T c^2 - 2 pi i c (z + b)
      C zb = z + C{R(b8) / R(8.0), R(0.0)};
      logpref = logpref - iunit * kPi * T * c * c - iunit * (R(2.0) * kPi) * c * zb;
      a8 += 2 * static_cast<int>(k);
    }
    long m = std::lround(to_double(z.re));
    if (m != 0) {
      z = z - C{R(static_cast<double>(m)), R(0.0)};
      // e^{2 pi i m a}
      logpref = logpref + iunit * (R(2.0) * kPi) * R(static_cast<double>(m)) * (R(a8) / R(8.0));
    }
    a8 = ((a8 % 8) + 8) % 8;

    C s = series(a8, b8, z, T, ctrl);
    if (k == 0 && m == 0) return s;
    return jjl::exp(logpref) * s;
  }

  static C series(int a8, int b8, C z, C T, const SeriesControl& ctrl) {
    const R kPi = pi();
    const C iunit{R(0.0), R(1.0)};
    const double term_cut = std::max(ctrl.tail_tolerance * 0.25, 1e-320);
    const bool half_b = (b8 % 8 == 4);
    const bool zero_b = (b8 % 8 == 0);

    if (a8 == 0 && (zero_b || half_b)) {
      // 1 + sum_{n>=1} exp(i pi T n^2) * (+-)^n * 2 cos(2 pi n z)
      C sum{R(1.0), R(0.0)};
      int n = 1;
      int small = 0;
      while (n <= ctrl.max_terms) {
        C g = jjl::exp(iunit * kPi * T * R(static_cast<double>(n) * n));
        C w = R(2.0) * jjl::cos((R(2.0) * kPi) * R(static_cast<double>(n)) * z);
        if (half_b && (n & 1)) w = -w;
        C t = g * w;
        sum += t;
        double tm = to_double(jjl::abs(t));
        small = (tm < term_cut) ? small + 1 : 0;
        if (small >= 2) return sum;
        ++n;
      }
      throw TruncationError(to_double(jjl::abs(
          jjl::exp(iunit * kPi * T * R(static_cast<double>(n) * n)))));
    }
    if (a8 == 4 && (zero_b || half_b)) {
      // sum_{n>=0} exp(i pi T (n+1/2)^2) * w_n,
      //   b=0:   w_n =  2 cos((2n+1) pi z)
      //   b=1/2: w_n = -(-1)^n 2 sin((2n+1) pi z)   [exact zero at z = 0]
      C sum{};
      int n = 0;
      int small = 0;
      while (n <= ctrl.max_terms) {
        R half = R(static_cast<double>(n)) + R(0.5);
        C g = jjl::exp(iunit * kPi * T * half * half);
        C w;
        if (zero_b) {
          w = R(2.0) * jjl::cos(kPi * R(2.0 * n + 1.0) * z);
        } else {
          w = R(-2.0) * jjl::sin(kPi * R(2.0 * n + 1.0) * z);
          if (n & 1) w = -w;
        }
        C t = g * w;
        sum += t;
        double tm = to_double(jjl::abs(t));
        small = (tm < term_cut) ? small + 1 : 0;
        if (small >= 2) return sum;
        ++n;
      }
      throw TruncationError(to_double(jjl::abs(sum)));
    }

    // Generic two-sided sum for quarter/eighth characteristics.
    C sum{};
    C b{R(b8) / R(8.0), R(0.0)};
    int n = 0;
    int small = 0;
    while (n <= ctrl.max_terms) {
      double consumed = 0.0;
      for (int sgn : {+1, -1}) {
        if (n == 0 && sgn < 0) continue;
        R na = R(static_cast<double>(sgn * n)) + R(a8) / R(8.0);
        C e = iunit * kPi * T * na * na + iunit * (R(2.0) * kPi) * na * (z + b);
        C t = jjl::exp(e);
        sum += t;
        consumed = std::max(consumed, to_double(jjl::abs(t)));
      }
      small = (consumed < term_cut) ? small + 1 : 0;
      if (small >= 3) return sum;
      ++n;
    }
    throw TruncationError(to_double(jjl::abs(sum)));
  }

  // Jacobi thetas in terms of characteristics: theta1 = -Theta[1/2;1/2],
  // theta2 = Theta[1/2;0], theta3 = Theta[0;0], theta4 = Theta[0;1/2].
  static C jacobi(int kind, C z, C tau, const SeriesControl& ctrl) {
    switch (kind) {
      case 1: return -theta(4, 4, z, tau, ctrl);
      case 2: return theta(4, 0, z, tau, ctrl);
      case 3: return theta(0, 0, z, tau, ctrl);
      case 4: return theta(0, 4, z, tau, ctrl);
      default: throw std::invalid_argument("jacobi_theta: kind must be 1..4");
    }
  }

  // theta1'(0|tau) by term-by-term differentiation of the sin series.
  static C theta1_prime0(C tau, const SeriesControl& ctrl) {
    const R kPi = pi();
    const C iunit{R(0.0), R(1.0)};
    C sum{};
    const double term_cut = std::max(ctrl.tail_tolerance * 0.25, 1e-320);
    for (int n = 0; n <= ctrl.max_terms; ++n) {
      R half = R(static_cast<double>(n)) + R(0.5);
      C g = jjl::exp(iunit * kPi * tau * half * half);
      C t = (R(2.0) * kPi) * R(2.0 * n + 1.0) * g;
      if (n & 1) t = -t;
      sum += t;
      if (to_double(jjl::abs(t)) < term_cut) return sum;
    }
    throw TruncationError(to_double(jjl::abs(sum)));
  }

  struct Tracked {
    C value;
    R winding;  // (total change of arg f) / 2
    bool terminal_zero;
    int samples;
  };

  // Analytic continuation of sqrt(f) along piecewise-linear waypoints,
  // starting from the principal branch at the first waypoint.  Segments are
  // pre-split to initial_step before the adaptive argument refinement; the
  // argument criterion alone cannot detect a full 2 pi wrap within a step.
  template <class F>
  static Tracked tracked_sqrt(F&& f, const std::vector<C>& pts, double max_arg_step,
                              double initial_step, const SeriesControl& ctrl) {
    (void)ctrl;
    int samples = 1;
    C f0 = f(pts.front());
    double scale = to_double(jjl::abs(f0));
    if (scale == 0.0) throw ZeroOnPathError(to_std(pts.front()));
    R arg0 = jjl::arg(f0);
    R acc{};
    C prev = f0;

    double plen = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      plen += to_double(jjl::abs(pts[i] - pts[i - 1]));
    const double min_len = std::max(plen * 1e-11, 1e-14);

    for (std::size_t seg = 1; seg < pts.size(); ++seg) {
      C a = pts[seg - 1];
      C b = pts[seg];
      const bool last_seg = (seg + 1 == pts.size());
      double seg_len = to_double(jjl::abs(b - a));
      int pieces = std::max(1, static_cast<int>(std::ceil(seg_len / initial_step)));
      // Work stack of pending right endpoints (in-order traversal).
      std::vector<C> stack;
      for (int p = pieces; p >= 1; --p)
        stack.push_back(a + (b - a) * C{R(static_cast<double>(p) / pieces), R(0.0)});
      C zprev = a;
      while (!stack.empty()) {
        C zt = stack.back();
        C fv = f(zt);
        ++samples;
        double mag = to_double(jjl::abs(fv));
        scale = std::max(scale, mag);
        const bool is_final = last_seg && stack.size() == 1;
        if (mag <= scale * 1e-13) {
          if (is_final) {
            // Simple zero at the endpoint: value is 0, branch irrelevant.
            return {C{}, acc / R(2.0), true, samples};
          }
          throw ZeroOnPathError(to_std(zt));
        }
        R dphi = jjl::arg(fv / prev);
        if (std::fabs(to_double(dphi)) > max_arg_step) {
          if (to_double(jjl::abs(zt - zprev)) < min_len) throw ZeroOnPathError(to_std(zt));
          stack.push_back((zprev + zt) / R(2.0));
          continue;
        }
        acc += dphi;
        prev = fv;
        zprev = zt;
        stack.pop_back();
      }
    }
    using std::sqrt;
    R mag = sqrt(jjl::abs(prev));
    R half_arg = (arg0 + acc) / R(2.0);
    R s, c;
    sincos(half_arg, s, c);
    return {C{mag * c, mag * s}, acc / R(2.0), false, samples};
  }
};

using EngineD = Engine<double>;
using EngineX = Engine<dd>;

}  // namespace detail

// ---------------------------------------------------------------------------
// Public double-precision surface.  `ctrl.precision` selects the lane the
// computation runs in; results are returned rounded to double either way.

std::complex<double> dedekind_eta(const TorusModulus& modulus, const SeriesControl& ctrl = {});

std::complex<double> theta_char(const ThetaCharacteristic& ch, std::complex<double> z,
                                const TorusModulus& modulus, const SeriesControl& ctrl = {});

// Theta with characteristics at explicit modulus argument (used for the
// charged characters, which live at modulus 4*tau).
std::complex<double> theta_char_at(const ThetaCharacteristic& ch, std::complex<double> z,
                                   std::complex<double> modulus, const SeriesControl& ctrl = {});

std::complex<double> jacobi_theta(int kind, std::complex<double> z, const TorusModulus& modulus,
                                  const SeriesControl& ctrl = {});

// Companion value theta1'(0|tau); exact term-by-term derivative by default,
// central finite difference + Richardson extrapolation when
// ctrl.exact_theta1_prime is false (the two routes cross-check each other).
std::complex<double> theta1_prime0(const TorusModulus& modulus, const SeriesControl& ctrl = {});

TrackedSqrtResult tracked_sqrt(
    const std::function<std::complex<double>(std::complex<double>)>& f, const ComplexPath& path,
    const SeriesControl& ctrl = {});

// Golden-value CSV row: re w, im w, re tau, im tau, re value, im value
// with 17 significant digits.
struct GoldenRow {
  std::complex<double> w;
  std::complex<double> tau;
  std::complex<double> value;
};
std::string golden_csv(const std::vector<GoldenRow>& rows);

}  // namespace jjl
