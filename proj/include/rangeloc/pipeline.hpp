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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rangeloc/config.hpp"
#include "rangeloc/estimators.hpp"
#include "rangeloc/observability.hpp"
#include "rangeloc/truth_sim.hpp"

namespace rangeloc {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNotObservable = 3,
  kExitNumerical = 4,
};

// Shortest round-trip decimal form.
std::string format_double(double v);

// k,t,x1,x2,x3,y_clean,y  or  k,t,x1,x2,x3,r1,r2,r3,y_clean,y
void write_trace_csv(std::ostream& out, const TruthTrace& trace);
// Reads x, r, y_clean, y back. Velocity, beacon and current are not stored
// in the CSV and are left empty/zero.
TruthTrace read_trace_csv(std::istream& in);

// k,t,xhat1,xhat2,xhat3,err_norm,trace_P[,vfhat1,vfhat2,vfhat3]
void write_estimate_csv(std::ostream& out, const EstimateTrace& est);
// k,t,err_norm[,vf_err_norm]
void write_error_csv(std::ostream& out, const EstimateTrace& est, const TruthTrace& truth);

struct ObservabilitySummary {
  Model model = Model::kFree;
  std::size_t samples = 0;
  double t_end = 0.0;
  // free model
  std::optional<LsResult> regression;
  double normal_diagonality = 0.0;
  std::optional<Vec3> x0_gramian;
  // both models: the 3x3 Gramian (free) or the 8x8 Gramian (current)
  GramianReport gramian;
  std::optional<GramianReport> g11;  // current model

  bool observable() const { return gramian.observable; }
};

ObservabilitySummary analyze_observability(const Scenario& s, const TruthTrace& truth);
void print_observability(std::ostream& out, const ObservabilitySummary& summary);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

// Overrides applied on top of a loaded scenario.
struct RunOptions {
  std::string out_dir;  // empty: command default
  std::optional<std::uint64_t> seed;
  std::optional<double> rank_tol;
  std::optional<std::size_t> reanchor_every;
  bool joseph_update = false;
  std::optional<std::string> trace_csv;  // estimate: read truth instead of simulating
};

Scenario apply_overrides(Scenario s, const RunOptions& opts);

struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;
};
void write_manifest(const std::string& path, const RunManifest& m);

// Command bodies. Human-readable output goes to `log`; the return value is
// the process exit code. ConfigError and NumericalError are mapped to exit
// codes here.
int cmd_simulate(const Scenario& s, const RunOptions& opts, std::ostream& log);
int cmd_observability(const Scenario& s, const RunOptions& opts, std::ostream& log);
int cmd_estimate(const Scenario& s, const RunOptions& opts, std::ostream& log);

enum class Experiment { kFree, kCurrent };
struct ReproduceResult {
  TruthTrace truth;
  EstimateTrace estimate;
  double seconds = 0.0;
};
ReproduceResult run_reproduction(Experiment which, const RunOptions& opts = {});
int cmd_reproduce(Experiment which, const RunOptions& opts, std::ostream& log);

// Loads a config file and runs one of simulate/observability/estimate.
int run_config_command(const std::string& command, const std::string& config_path,
                       const RunOptions& opts, std::ostream& log);

}  // namespace rangeloc
