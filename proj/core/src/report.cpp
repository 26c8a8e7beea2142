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

#include "jjl/report.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "jjl/characters.hpp"

namespace jjl {

bool VerificationReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void VerificationReport::add(const std::string& name, const std::string& anchor, bool ok,
                             double residual, int samples, const std::string& note) {
  if (!known_anchor(anchor))
    throw std::logic_error("VerificationReport: unknown anchor '" + anchor + "'");
  checks.push_back({name, anchor, ok, residual, samples, note});
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::string VerificationReport::to_json(bool with_timestamp) const {
  std::ostringstream os;
  os << "{\n";
  os << "  \"artifact_version\": \"" << artifact_version << "\",\n";
  os << "  \"command\": \"" << json_escape(command) << "\",\n";
  os << "  \"config_hash\": \"" << config_hash << "\",\n";
  os << "  \"seed\": " << seed << ",\n";
  os << "  \"precision\": \"" << precision << "\",\n";
  if (with_timestamp) {
    auto now = std::chrono::system_clock::now();
    os << "  \"timestamp\": "
       << std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count()
       << ",\n";
  }
  os << "  \"status\": \"" << (pass() ? "pass" : "fail") << "\",\n";
  os << "  \"wall_ms\": " << fmt_double(wall_ms) << ",\n";
  os << "  \"checks\": [\n";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    os << "    {\"name\": \"" << json_escape(c.name) << "\", \"anchor\": \"" << c.anchor
       << "\", \"status\": \"" << (c.pass ? "pass" : "fail")
       << "\", \"residual\": " << fmt_double(c.residual) << ", \"samples\": " << c.samples;
    if (!c.note.empty()) os << ", \"note\": \"" << json_escape(c.note) << "\"";
    os << "}" << (i + 1 < checks.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << "jjl " << command << " (seed " << seed << ", " << precision << ", config "
     << config_hash << ")\n";
  for (const auto& c : checks) {
    os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << std::left << std::setw(44) << c.name
       << " residual " << std::scientific << std::setprecision(2) << c.residual
       << std::defaultfloat << "  n=" << c.samples << "  [" << c.anchor << "]";
    if (!c.note.empty()) os << "  " << c.note;
    os << "\n";
  }
  os << (pass() ? "PASS" : "FAIL") << " (" << checks.size() << " checks, "
     << std::fixed << std::setprecision(0) << wall_ms << " ms)\n";
  return os.str();
}

std::string VerificationReport::to_csv() const {
  std::ostringstream os;
  os << "name,anchor,status,residual,samples,note\n";
  for (const auto& c : checks) {
    os << '"' << c.name << "\"," << c.anchor << ',' << (c.pass ? "pass" : "fail") << ','
       << fmt_double(c.residual) << ',' << c.samples << ",\"" << c.note << "\"\n";
  }
  return os.str();
}

std::string config_hash_hex(const std::string& canonical_config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace jjl
