// Copyright 2026 The rangeloc Authors
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

#include <cstdint>
#include <optional>
#include <string>

#include "rangeloc/estimators.hpp"
#include "rangeloc/truth_sim.hpp"

namespace rangeloc {

struct AnalysisSettings {
  std::optional<double> rank_tol;  // relative to sigma_max
};

// One scenario file: simulation, filter and analysis settings.
struct Scenario {
  ScenarioConfig sim;
  FilterSettings filter;
  AnalysisSettings analysis;
};

// Parses a YAML scenario. Relative CSV input paths are resolved against
// base_dir. Throws ConfigError naming the offending field.
Scenario parse_config(const std::string& text, const std::string& base_dir = "");
Scenario load_config(const std::string& path);

// Canonical YAML for a scenario; parse_config(serialize_config(s)) == s.
std::string serialize_config(const Scenario& s);

// Full validation (simulation and filter sections).
void validate(const Scenario& s);

// Built-in reproduction scenarios.
Scenario reproduce_free_scenario();
Scenario reproduce_current_scenario();

// FNV-1a of the canonical serialization.
std::uint64_t config_hash(const Scenario& s);

}  // namespace rangeloc
