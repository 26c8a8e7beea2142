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

// Double-double arithmetic: an unevaluated sum of two doubles giving ~32
// significant decimal digits.  This is the "extended" precision lane used to
// certify cancellations that double precision cannot resolve.  The algorithms
// are the standard error-free transformations (Dekker/Knuth two-sum, FMA
// two-prod) plus range-reduced Taylor kernels for exp/sin/cos.

#include <cmath>
#include <cstdint>
#include <limits>

namespace jjl {

struct dd {
  double hi{0.0};
  double lo{0.0};

  constexpr dd() = default;
  constexpr dd(double h) : hi(h), lo(0.0) {}
  constexpr dd(double h, double l) : hi(h), lo(l) {}

  explicit operator double() const { return hi; }
};

namespace dd_detail {

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

// Requires |a| >= |b| (or a == 0).
inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline dd operator+(dd a, dd b) {
  using namespace dd_detail;
  dd s = two_sum(a.hi, b.hi);
  dd t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
  using namespace dd_detail;
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
  using namespace dd_detail;
  double q1 = a.hi / b.hi;
  dd r = a - dd(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - dd(q2) * b;
  double q3 = r.hi / b.hi;
  dd q = quick_two_sum(q1, q2);
  return q + dd(q3);
}

inline dd& operator+=(dd& a, dd b) { return a = a + b; }
inline dd& operator-=(dd& a, dd b) { return a = a - b; }
inline dd& operator*=(dd& a, dd b) { return a = a * b; }
inline dd& operator/=(dd& a, dd b) { return a = a / b; }

inline bool operator==(dd a, dd b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }
inline bool operator<=(dd a, dd b) { return !(b < a); }
inline bool operator>=(dd a, dd b) { return !(a < b); }

inline double to_double(dd a) { return a.hi; }
inline double to_double(double a) { return a; }

inline dd fabs(dd a) { return (a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0)) ? -a : a; }
inline dd abs(dd a) { return fabs(a); }
inline bool isfinite(dd a) { return std::isfinite(a.hi) && std::isfinite(a.lo); }

inline dd ldexp(dd a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }
inline dd mul_pwr2(dd a, double p) { return {a.hi * p, a.lo * p}; }

namespace dd_const {
// hi/lo decompositions accurate to ~1e-32.
inline constexpr dd pi{3.141592653589793, 1.2246467991473532e-16};
inline constexpr dd two_pi{6.283185307179586, 2.4492935982947064e-16};
inline constexpr dd half_pi{1.5707963267948966, 6.123233995736766e-17};
inline constexpr dd ln2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr double eps = 4.93e-32;  // 2^-104
}  // namespace dd_const

inline dd sqr(dd a) {
  using namespace dd_detail;
  dd p = two_prod(a.hi, a.hi);
  p.lo += 2.0 * a.hi * a.lo;
  return quick_two_sum(p.hi, p.lo);
}

inline dd sqrt(dd a) {
  if (a.hi == 0.0 && a.lo == 0.0) return {};
  // Karp's trick: one high-precision correction of the double estimate.
  double x = 1.0 / std::sqrt(a.hi);
  double ax = a.hi * x;
  dd err = a - sqr(dd(ax));
  return dd(ax) + dd(err.hi * (x * 0.5));
}

inline dd exp(dd a) {
  // exp(a) = 2^m * (exp(r))^512 with r = (a - m ln2)/512 kept tiny.
  if (a.hi <= -709.0) return {};
  if (a.hi >= 709.0) return {std::numeric_limits<double>::infinity(), 0.0};
  double m = std::floor(a.hi / dd_const::ln2.hi + 0.5);
  dd r = mul_pwr2(a - dd_const::ln2 * dd(m), 1.0 / 512.0);
  dd p = sqr(r);
  dd s = r + mul_pwr2(p, 0.5);
  p = p * r;
  double fact = 6.0;  // 3!
  dd t = p / dd(fact);
  int k = 4;
  while (std::fabs(t.hi) > 1e-40) {
    s += t;
    p = p * r;
    fact *= k++;
    t = p / dd(fact);
  }
  s += t;
  for (int i = 0; i < 9; ++i) s = mul_pwr2(s, 2.0) + sqr(s);
  s += dd(1.0);
  return ldexp(s, static_cast<int>(m));
}

namespace dd_detail {

// Taylor kernels on |x| <= pi/4.
inline dd sin_taylor(dd x) {
  if (x.hi == 0.0 && x.lo == 0.0) return {};
  dd x2 = sqr(x);
  dd term = x;
  dd s = x;
  double fact = 1.0;
  int k = 1;
  do {
    term = term * x2;
    fact *= (2 * k) * (2 * k + 1);
    ++k;
    dd t = (k % 2 == 0) ? -(term / dd(fact)) : term / dd(fact);
    s += t;
    if (std::fabs(term.hi) / fact < 1e-40) break;
  } while (k < 40);
  return s;
}

inline dd cos_taylor(dd x) {
  dd x2 = sqr(x);
  dd term{1.0};
  dd s{1.0};
  double fact = 1.0;
  int k = 0;
  do {
    term = term * x2;
    fact *= (2 * k + 1) * (2 * k + 2);
    ++k;
    dd t = (k % 2 == 1) ? -(term / dd(fact)) : term / dd(fact);
    s += t;
    if (std::fabs(term.hi) / fact < 1e-40) break;
  } while (k < 40);
  return s;
}

}  // namespace dd_detail

inline void sincos(dd a, dd& s, dd& c) {
  // Reduce modulo pi/2; quadrant handled exactly.
  double k = std::floor(a.hi / dd_const::half_pi.hi + 0.5);
  dd r = a - dd_const::half_pi * dd(k);
  // One correction pass in case the seed rounding put r slightly outside.
  if (std::fabs(r.hi) > 0.7853982) {
    double k2 = std::floor(r.hi / dd_const::half_pi.hi + 0.5);
    r = r - dd_const::half_pi * dd(k2);
    k += k2;
  }
  long q = static_cast<long>(std::fmod(k, 4.0));
  if (q < 0) q += 4;
  dd st = dd_detail::sin_taylor(r);
  dd ct = dd_detail::cos_taylor(r);
  switch (q) {
    case 0: s = st;  c = ct;  break;
    case 1: s = ct;  c = -st; break;
    case 2: s = -st; c = -ct; break;
    default: s = -ct; c = st; break;
  }
}

inline dd sin(dd a) { dd s, c; sincos(a, s, c); return s; }
inline dd cos(dd a) { dd s, c; sincos(a, s, c); return c; }
inline dd cosh(dd a) { dd e = exp(a); return mul_pwr2(e + dd(1.0) / e, 0.5); }
inline dd sinh(dd a) { dd e = exp(a); return mul_pwr2(e - dd(1.0) / e, 0.5); }

inline dd atan2(dd y, dd x) {
  if (y.hi == 0.0 && y.lo == 0.0) {
    return (x.hi >= 0.0) ? dd{} : dd_const::pi;
  }
  // Newton refinement of the double seed on sin/cos residuals.
  dd theta{std::atan2(y.hi, x.hi)};
  for (int i = 0; i < 2; ++i) {
    dd s, c;
    sincos(theta, s, c);
    dd num = y * c - x * s;
    dd den = x * c + y * s;
    theta += num / den;
  }
  return theta;
}

}  // namespace jjl
