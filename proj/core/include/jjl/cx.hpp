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

// Minimal complex type over a generic real scalar (double or jjl::dd).
// std::complex is only specified for the builtin floating types, so the
// extended-precision lane needs its own.

#include <cmath>
#include <complex>

#include "jjl/dd.hpp"

namespace jjl {

template <class R>
struct cx {
  R re{};
  R im{};

  constexpr cx() = default;
  constexpr cx(R r) : re(r) {}
  constexpr cx(R r, R i) : re(r), im(i) {}
};

using cxd = cx<double>;

template <class R> cx<R> operator+(cx<R> a, cx<R> b) { return {a.re + b.re, a.im + b.im}; }
template <class R> cx<R> operator-(cx<R> a, cx<R> b) { return {a.re - b.re, a.im - b.im}; }
template <class R> cx<R> operator-(cx<R> a) { return {-a.re, -a.im}; }
template <class R> cx<R> operator*(cx<R> a, cx<R> b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R> cx<R> operator*(R s, cx<R> a) { return {s * a.re, s * a.im}; }
template <class R> cx<R> operator*(cx<R> a, R s) { return {a.re * s, a.im * s}; }
template <class R> cx<R> operator/(cx<R> a, cx<R> b) {
  R d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
template <class R> cx<R> operator/(cx<R> a, R s) { return {a.re / s, a.im / s}; }
template <class R> cx<R>& operator+=(cx<R>& a, cx<R> b) { return a = a + b; }
template <class R> cx<R>& operator-=(cx<R>& a, cx<R> b) { return a = a - b; }
template <class R> cx<R>& operator*=(cx<R>& a, cx<R> b) { return a = a * b; }

template <class R> cx<R> conj(cx<R> a) { return {a.re, -a.im}; }

inline void sincos(double a, double& s, double& c) { s = std::sin(a); c = std::cos(a); }

template <class R>
R abs(cx<R> a) {
  using std::sqrt;
  return sqrt(a.re * a.re + a.im * a.im);
}

template <class R>
R arg(cx<R> a) {
  using std::atan2;
  return atan2(a.im, a.re);
}

template <class R>
cx<R> exp(cx<R> a) {
  using std::exp;
  R m = exp(a.re);
  R s, c;
  sincos(a.im, s, c);
  return {m * c, m * s};
}

// Principal branch.
template <class R>
cx<R> sqrt(cx<R> a) {
  using std::sqrt;
  R m = sqrt(abs(a));
  R half = R(0.5);
  R s, c;
  sincos(arg(a) * half, s, c);
  return {m * c, m * s};
}

template <class R>
cx<R> cos(cx<R> a) {
  using std::cosh;
  using std::sinh;
  R s, c;
  sincos(a.re, s, c);
  return {c * cosh(a.im), -s * sinh(a.im)};
}

template <class R>
cx<R> sin(cx<R> a) {
  using std::cosh;
  using std::sinh;
  R s, c;
  sincos(a.re, s, c);
  return {s * cosh(a.im), c * sinh(a.im)};
}

template <class R>
std::complex<double> to_std(cx<R> a) {
  return {to_double(a.re), to_double(a.im)};
}

template <class R>
cx<R> from_std(std::complex<double> a) {
  return {R(a.real()), R(a.imag())};
}

}  // namespace jjl
