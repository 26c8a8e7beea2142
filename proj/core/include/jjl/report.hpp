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

// Machine- and human-readable verification reports.  Reports are
// reproducible: identical config and seed give byte-identical JSON except
// for the timestamp field.

#include <cstdint>
#include <string>
#include <vector>

namespace jjl {

struct CheckRow {
  std::string name;
  std::string anchor;  // must exist in the characters-module registry
  bool pass = false;
  double residual = 0.0;
  int samples = 0;
  std::string note;
};

struct VerificationReport {
  std::string artifact_version = "0.1.0";
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string precision = "double";
  std::vector<CheckRow> checks;
  double wall_ms = 0.0;

  bool pass() const;
  void add(const std::string& name, const std::string& anchor, bool ok, double residual,
           int samples, const std::string& note = "");

  std::string to_json(bool with_timestamp = true) const;
  std::string to_text() const;
  std::string to_csv() const;
};

// FNV-1a over the canonical config dump; stable across runs.
std::string config_hash_hex(const std::string& canonical_config);

}  // namespace jjl
