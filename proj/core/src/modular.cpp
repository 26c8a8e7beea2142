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

#include "jjl/modular.hpp"

#include <sstream>
#include <iomanip>

namespace jjl {

namespace {

template <class R>
std::complex<double> run_eta(std::complex<double> tau, const SeriesControl& ctrl) {
  return to_std(detail::Engine<R>::eta(from_std<R>(tau), ctrl));
}

template <class R>
std::complex<double> run_theta(int a8, int b8, std::complex<double> z, std::complex<double> T,
                               const SeriesControl& ctrl) {
  return to_std(detail::Engine<R>::theta(a8, b8, from_std<R>(z), from_std<R>(T), ctrl));
}

void check_guard(std::complex<double> z, std::complex<double> T, const SeriesControl& ctrl) {
  if (std::abs(z.imag()) > ctrl.im_guard_factor * T.imag())
    throw std::domain_error("theta: |Im z| exceeds overflow guard for requested tolerance");
}

}  // namespace

std::complex<double> dedekind_eta(const TorusModulus& modulus, const SeriesControl& ctrl) {
  ctrl.validate();
  if (ctrl.precision == Precision::kExtended) return run_eta<dd>(modulus.tau, ctrl);
  return run_eta<double>(modulus.tau, ctrl);
}

std::complex<double> theta_char(const ThetaCharacteristic& ch, std::complex<double> z,
                                const TorusModulus& modulus, const SeriesControl& ctrl) {
  return theta_char_at(ch, z, modulus.tau, ctrl);
}

std::complex<double> theta_char_at(const ThetaCharacteristic& ch, std::complex<double> z,
                                   std::complex<double> modulus, const SeriesControl& ctrl) {
  ctrl.validate();
  if (!(modulus.imag() > 0.0)) throw std::invalid_argument("theta: Im modulus must be > 0");
  check_guard(z, modulus, ctrl);
  if (ctrl.precision == Precision::kExtended)
    return run_theta<dd>(ch.a8(), ch.b8(), z, modulus, ctrl);
  return run_theta<double>(ch.a8(), ch.b8(), z, modulus, ctrl);
}

std::complex<double> jacobi_theta(int kind, std::complex<double> z, const TorusModulus& modulus,
                                  const SeriesControl& ctrl) {
  ctrl.validate();
  if (kind < 1 || kind > 4) throw std::invalid_argument("jacobi_theta: kind must be 1..4");
  check_guard(z, modulus.tau, ctrl);
  if (ctrl.precision == Precision::kExtended)
    return to_std(detail::EngineX::jacobi(kind, from_std<dd>(z), from_std<dd>(modulus.tau), ctrl));
  return to_std(
      detail::EngineD::jacobi(kind, from_std<double>(z), from_std<double>(modulus.tau), ctrl));
}

std::complex<double> theta1_prime0(const TorusModulus& modulus, const SeriesControl& ctrl) {
  ctrl.validate();
  if (ctrl.exact_theta1_prime) {
    if (ctrl.precision == Precision::kExtended)
      return to_std(detail::EngineX::theta1_prime0(from_std<dd>(modulus.tau), ctrl));
    return to_std(detail::EngineD::theta1_prime0(from_std<double>(modulus.tau), ctrl));
  }
  // Central difference, two Richardson levels: error O(h^6).
  auto th1 = [&](double h) {
    return (jacobi_theta(1, {h, 0.0}, modulus, ctrl) - jacobi_theta(1, {-h, 0.0}, modulus, ctrl)) /
           (2.0 * h);
  };
  const double h = 1e-2;
  std::complex<double> d1 = th1(h), d2 = th1(h / 2.0), d3 = th1(h / 4.0);
  std::complex<double> r1 = (4.0 * d2 - d1) / 3.0;
  std::complex<double> r2 = (4.0 * d3 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

TrackedSqrtResult tracked_sqrt(
    const std::function<std::complex<double>(std::complex<double>)>& f, const ComplexPath& path,
    const SeriesControl& ctrl) {
  ctrl.validate();
  path.validate();
  if (ctrl.precision == Precision::kExtended) {
    std::vector<cx<dd>> pts;
    pts.reserve(path.waypoints.size());
    for (auto w : path.waypoints) pts.push_back(from_std<dd>(w));
    auto fx = [&](cx<dd> z) { return from_std<dd>(f(to_std(z))); };
    auto r = detail::EngineX::tracked_sqrt(fx, pts, path.max_arg_step, path.initial_step, ctrl);
    return {to_std(r.value), to_double(r.winding), r.terminal_zero, r.samples};
  }
  std::vector<cxd> pts;
  pts.reserve(path.waypoints.size());
  for (auto w : path.waypoints) pts.push_back(from_std<double>(w));
  auto fd = [&](cxd z) { return from_std<double>(f(to_std(z))); };
  auto r = detail::EngineD::tracked_sqrt(fd, pts, path.max_arg_step, path.initial_step, ctrl);
  return {to_std(r.value), r.winding, r.terminal_zero, r.samples};
}

std::string golden_csv(const std::vector<GoldenRow>& rows) {
  std::ostringstream os;
  os << "re_w,im_w,re_tau,im_tau,re_value,im_value\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.w.real() << ',' << r.w.imag() << ',' << r.tau.real() << ',' << r.tau.imag() << ','
       << r.value.real() << ',' << r.value.imag() << '\n';
  }
  return os.str();
}

}  // namespace jjl
