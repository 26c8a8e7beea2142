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

#include "jjl/cx.hpp"
#include "jjl/dd.hpp"

using jjl::dd;

namespace {

double dd_err(dd got, double want_hi, double want_lo) {
  dd diff = got - dd{want_hi, want_lo};
  return std::fabs(jjl::to_double(diff));
}

}  // namespace

TEST_CASE("dd arithmetic keeps ~32 digits") {
  dd third = dd(1.0) / dd(3.0);
  dd back = third * dd(3.0) - dd(1.0);
  CHECK(std::fabs(back.hi) < 1e-31);

  dd r = jjl::sqrt(dd(2.0));
  dd resid = r * r - dd(2.0);
  CHECK(std::fabs(resid.hi) < 1e-31);
}

TEST_CASE("dd exp and sincos match reference decompositions") {
  // e = 2.718281828459045 + 1.4456468917292502e-16
  CHECK(dd_err(jjl::exp(dd(1.0)), 2.718281828459045, 1.4456468917292502e-16) < 1e-31);

  dd s, c;
  jjl::sincos(jjl::dd_const::pi, s, c);
  CHECK(std::fabs(s.hi) < 1e-31);  // sin(pi) = 0 at dd resolution
  CHECK(dd_err(c, -1.0, 0.0) < 1e-31);

  // Pythagoras at a generic point.
  jjl::sincos(dd(0.7), s, c);
  dd one = s * s + c * c;
  CHECK(dd_err(one, 1.0, 0.0) < 1e-31);

  // Large-argument reduction stays accurate.
  jjl::sincos(dd(300.0), s, c);
  CHECK(std::fabs(jjl::to_double(s * s + c * c - dd(1.0))) < 1e-29);
}

TEST_CASE("dd atan2 inverts sincos") {
  for (double ang : {0.3, 2.5, -2.9, -0.1}) {
    dd s, c;
    jjl::sincos(dd(ang), s, c);
    dd back = jjl::atan2(s, c);
    CHECK(std::fabs(jjl::to_double(back - dd(ang))) < 1e-30);
  }
}

TEST_CASE("complex dd exp/sqrt round trips") {
  jjl::cx<dd> z{dd(0.3), dd(-1.2)};
  auto e = jjl::exp(z);
  // |exp(z)| = exp(re z)
  dd mag = jjl::abs(e);
  CHECK(std::fabs(jjl::to_double(mag - jjl::exp(dd(0.3)))) < 1e-30);

  auto r = jjl::sqrt(z);
  auto sq = r * r - z;
  CHECK(jjl::to_double(jjl::abs(sq)) < 1e-30);
}
