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

#include "rangeloc/truth_sim.hpp"

#include <algorithm>
#include <cmath>

#include "rangeloc/errors.hpp"
#include "rangeloc/rng.hpp"

namespace rangeloc {

void NoiseSpec::validate() const {
  if (!state_var.empty() && state_var.size() != 3) {
    throw ConfigError("noise.state_var", "expected 3 entries");
  }
  for (double v : state_var) {
    if (!(v >= 0.0)) throw ConfigError("noise.state_var", "variances must be >= 0");
  }
  if (!(output_var >= 0.0)) throw ConfigError("noise.output_var", "must be >= 0");
}

void ScenarioConfig::validate() const {
  if (!(ts > 0.0)) throw ConfigError("ts", "must be positive");
  if (steps < 1) throw ConfigError("steps", "must be >= 1");
  if (!x0.allFinite()) throw ConfigError("x0", "must be finite");
  if (model == Model::kFree && !current.isZero(0.0)) {
    throw ConfigError("current", "must be zero for the current-free model");
  }
  noise.validate();
}

namespace {

bool has_state_noise(const NoiseSpec& noise) {
  return std::any_of(noise.state_var.begin(), noise.state_var.end(),
                     [](double v) { return v > 0.0; });
}

Vec3 state_disturbance(const NoiseSpec& noise, const CounterNormal& rng, std::size_t k) {
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    const auto channel = static_cast<std::uint32_t>(NoiseChannel::kStateX) + i;
    w[i] = std::sqrt(noise.state_var[static_cast<std::size_t>(i)]) * rng(k, channel);
  }
  return w;
}

void attach_measurements(TruthTrace& trace, const ScenarioConfig& cfg) {
  auto m = measure(trace.y_clean, cfg.noise, cfg.seed);
  trace.y = std::move(m.y);
  trace.diagnostics = m.diagnostics;
}

}  // namespace

TruthTrace propagate_free(const ScenarioConfig& cfg) {
  cfg.validate();
  if (!cfg.current.isZero(0.0)) {
    throw PreconditionError("propagate_free requires a zero current");
  }
  const std::size_t n = cfg.samples();
  const auto input = sample_input(cfg.input, cfg.ts, n, cfg.body_to_inertial);
  const CounterNormal rng(cfg.seed);
  const bool noisy = has_state_noise(cfg.noise);

  TruthTrace trace;
  trace.model = Model::kFree;
  trace.ts = cfg.ts;
  trace.velocity = input.samples;
  trace.x.resize(n);
  trace.y_clean.resize(n);
  trace.x[0] = cfg.x0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    trace.x[k + 1] = trace.x[k] + cfg.ts * input.samples[k + 1];
    if (noisy) trace.x[k + 1] += state_disturbance(cfg.noise, rng, k);
  }
  for (std::size_t k = 0; k < n; ++k) trace.y_clean[k] = trace.x[k].squaredNorm();
  attach_measurements(trace, cfg);
  return trace;
}

TruthTrace propagate_current(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.samples();
  const auto input = sample_input(cfg.input, cfg.ts, n, cfg.body_to_inertial);
  const CounterNormal rng(cfg.seed);
  const bool noisy = has_state_noise(cfg.noise);

  TruthTrace trace;
  trace.model = Model::kCurrent;
  trace.ts = cfg.ts;
  trace.beacon = cfg.beacon;
  trace.current = cfg.current;
  trace.velocity = input.samples;
  trace.r.resize(n);
  trace.x.resize(n);
  trace.y_clean.resize(n);
  trace.r[0] = cfg.beacon - cfg.x0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    trace.r[k + 1] = trace.r[k] - cfg.ts * (cfg.current + input.samples[k + 1]);
    if (noisy) trace.r[k + 1] -= state_disturbance(cfg.noise, rng, k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    trace.x[k] = cfg.beacon - trace.r[k];
    trace.y_clean[k] = trace.r[k].squaredNorm();
  }
  attach_measurements(trace, cfg);
  return trace;
}

TruthTrace propagate(const ScenarioConfig& cfg) {
  return cfg.model == Model::kFree ? propagate_free(cfg) : propagate_current(cfg);
}

Measurements measure(const std::vector<double>& y_clean, const NoiseSpec& noise,
                     std::uint64_t seed) {
  noise.validate();
  Measurements out;
  out.y.resize(y_clean.size());
  const CounterNormal rng(seed);
  const double sigma = std::sqrt(noise.output_var);
  const auto channel = static_cast<std::uint32_t>(NoiseChannel::kOutput);
  const auto n = static_cast<std::ptrdiff_t>(y_clean.size());
  std::size_t clamped = 0;

  if (noise.apply_to == NoiseDomain::kSquaredRange) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      out.y[i] = sigma > 0.0 ? y_clean[i] + sigma * rng(i, channel) : y_clean[i];
    }
  } else {
#pragma omp parallel for schedule(static) reduction(+ : clamped)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      double range = std::sqrt(y_clean[i]);
      if (sigma > 0.0) range += sigma * rng(i, channel);
      if (range < 0.0) {
        range = 0.0;
        ++clamped;
      }
      out.y[i] = range * range;
    }
  }
  out.diagnostics.clamped = clamped;
  return out;
}

}  // namespace rangeloc
