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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rangeloc/frames.hpp"
#include "rangeloc/signals.hpp"

namespace rangeloc {

enum class Model { kFree, kCurrent };

enum class NoiseDomain {
  kSquaredRange,  // y = |x|^2 + eps
  kRange,         // y = (|x| + eta)^2
};

struct NoiseSpec {
  // Per-axis variance of the additive position disturbance [m^2]. Empty or
  // all-zero means the truth trajectory is deterministic.
  std::vector<double> state_var;
  // Variance of the output noise: [m^4] on squared range, [m^2] on range.
  double output_var = 0.0;
  NoiseDomain apply_to = NoiseDomain::kSquaredRange;

  void validate() const;
};

struct ScenarioConfig {
  Model model = Model::kFree;
  Vec3 x0 = Vec3::Zero();
  Vec3 beacon = Vec3::Zero();   // s, current model only
  Vec3 current = Vec3::Zero();  // v_f, current model only
  double ts = 0.01;
  std::size_t steps = 1;
  InputSpec input = ConstantInput{};
  Rotation3 body_to_inertial;
  NoiseSpec noise;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t samples() const { return steps + 1; }
};

struct MeasurementDiagnostics {
  // Range-domain draws where |x| + eta < 0; the range was clamped to zero.
  std::size_t clamped = 0;
};

struct Measurements {
  std::vector<double> y;
  MeasurementDiagnostics diagnostics;
};

// Ground truth on the grid t_k = k ts, k = 0..steps.
struct TruthTrace {
  Model model = Model::kFree;
  double ts = 0.01;
  Vec3 beacon = Vec3::Zero();
  Vec3 current = Vec3::Zero();
  std::vector<Vec3> velocity;  // inertial input u (free) or v_r (current)
  std::vector<Vec3> x;
  std::vector<Vec3> r;  // s - x, current model only
  std::vector<double> y_clean;
  std::vector<double> y;
  MeasurementDiagnostics diagnostics;

  std::size_t size() const { return x.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * ts; }
};

// x_{k+1} = x_k + ts u_{k+1} (+ w_k), y_clean = |x|^2.
TruthTrace propagate_free(const ScenarioConfig& cfg);

// r_{k+1} = r_k - ts (v_f + v_r_{k+1}) (+ w_k), x = s - r, y_clean = |r|^2.
TruthTrace propagate_current(const ScenarioConfig& cfg);

// Dispatches on cfg.model.
TruthTrace propagate(const ScenarioConfig& cfg);

// Adds output noise to a clean squared-range sequence. Deterministic in seed.
Measurements measure(const std::vector<double>& y_clean, const NoiseSpec& noise,
                     std::uint64_t seed);

}  // namespace rangeloc
