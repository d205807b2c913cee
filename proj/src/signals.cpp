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

#include "rangeloc/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rangeloc/errors.hpp"

namespace rangeloc {

SinusoidInput SinusoidInput::from_amplitude(const Vec3& amplitude,
                                            std::array<int, 3> harmonics, int n0,
                                            double ts) {
  SinusoidInput s;
  s.amplitude = amplitude;
  s.harmonics = harmonics;
  s.n0 = n0;
  s.ts = ts;
  s.validate();
  return s;
}

SinusoidInput SinusoidInput::from_max_speed(const Vec3& max_speed,
                                            std::array<int, 3> harmonics, int n0,
                                            double ts) {
  SinusoidInput s = from_amplitude(Vec3::Zero(), harmonics, n0, ts);
  for (int i = 0; i < 3; ++i) {
    s.amplitude[i] = max_speed[i] / (harmonics[static_cast<std::size_t>(i)] * s.omega());
  }
  return s;
}

int SinusoidInput::base_period_samples(double omega, double ts) {
  if (!(omega > 0.0) || !(ts > 0.0)) {
    throw PreconditionError("omega and ts must be positive");
  }
  const double n0 = 2.0 * std::numbers::pi / (omega * ts);
  const double rounded = std::round(n0);
  if (rounded < 1.0 || std::abs(n0 - rounded) > 1e-6 * rounded) {
    throw PreconditionError("2 pi / (omega ts) = " + std::to_string(n0) +
                            " is not an integer number of samples");
  }
  return static_cast<int>(rounded);
}

double SinusoidInput::omega() const { return 2.0 * std::numbers::pi / base_period(); }

Vec3 SinusoidInput::max_speed() const {
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    v[i] = std::abs(amplitude[i]) * harmonics[static_cast<std::size_t>(i)] * omega();
  }
  return v;
}

void SinusoidInput::validate() const {
  if (!(ts > 0.0)) throw PreconditionError("sinusoid: ts must be positive");
  if (n0 < 1) throw PreconditionError("sinusoid: n0 must be a positive integer");
  for (int h : harmonics) {
    if (h < 1) throw PreconditionError("sinusoid: harmonics must be positive integers");
  }
  if (harmonics[0] == harmonics[1] || harmonics[0] == harmonics[2] ||
      harmonics[1] == harmonics[2]) {
    throw PreconditionError("sinusoid: harmonics must be pairwise distinct");
  }
}

Vec3 eval_sinusoid(const SinusoidInput& s, double t) {
  const double w = s.omega();
  Vec3 u;
  for (int i = 0; i < 3; ++i) {
    const double n = s.harmonics[static_cast<std::size_t>(i)];
    u[i] = s.amplitude[i] * n * w * std::cos(n * w * t);
  }
  return u;
}

Vec3 eval_literature_profile(double t) {
  return {2.0 * std::cos(t), -4.0 * std::sin(2.0 * t), std::cos(0.5 * t)};
}

std::size_t IntegralTrace::index_at(double t) const {
  const double k = std::round(t / ts);
  if (!(k >= 0.0) || k > static_cast<double>(values.size()) - 1.0) {
    throw PreconditionError("time " + std::to_string(t) + " outside the integral trace");
  }
  return static_cast<std::size_t>(k);
}

IntegralTrace integrate(const SampledSignal& signal) {
  if (!(signal.ts > 0.0)) throw PreconditionError("signal ts must be positive");
  if (signal.samples.empty()) throw PreconditionError("signal has no samples");
  IntegralTrace out;
  out.ts = signal.ts;
  out.values.resize(signal.samples.size());
  out.values[0] = Vec3::Zero();
  for (std::size_t k = 1; k < signal.samples.size(); ++k) {
    out.values[k] = out.values[k - 1] + signal.ts * signal.samples[k];
  }
  return out;
}

std::vector<TimedSample> read_input_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("input.path", "cannot open '" + path + "'");
  std::vector<TimedSample> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    TimedSample row{};
    if (!(fields >> row.t >> row.u.x() >> row.u.y() >> row.u.z())) {
      // header row
      if (rows.empty() && lineno == 1) continue;
      throw ConfigError("input.path", path + ":" + std::to_string(lineno) +
                                          " expected t,ux,uy,uz");
    }
    if (!rows.empty() && row.t <= rows.back().t) {
      throw ConfigError("input.path", path + ":" + std::to_string(lineno) +
                                          " times must be strictly increasing");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ConfigError("input.path", path + " has no samples");
  return rows;
}

namespace {

struct SampleVisitor {
  double ts;
  std::size_t count;

  std::vector<Vec3> operator()(const SinusoidInput& s) const {
    return fill([&](double t) { return eval_sinusoid(s, t); });
  }
  std::vector<Vec3> operator()(const LiteratureInput&) const {
    return fill(eval_literature_profile);
  }
  std::vector<Vec3> operator()(const ConstantInput& c) const {
    return std::vector<Vec3>(count, c.value);
  }
  std::vector<Vec3> operator()(const CsvInput& c) const {
    const auto rows = read_input_csv(c.path);
    std::vector<Vec3> out(count);
    std::size_t j = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const double t = static_cast<double>(k) * ts;
      while (j + 1 < rows.size() && rows[j + 1].t <= t + 1e-12 * std::max(1.0, t)) ++j;
      out[k] = rows[j].t <= t + 1e-12 * std::max(1.0, t) ? rows[j].u : Vec3::Zero();
    }
    return out;
  }

  template <class F>
  std::vector<Vec3> fill(F&& f) const {
    std::vector<Vec3> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = f(static_cast<double>(k) * ts);
    return out;
  }
};

}  // namespace

SampledSignal sample_input(const InputSpec& spec, double ts, std::size_t count,
                           const Rotation3& body_to_inertial) {
  if (!(ts > 0.0)) throw PreconditionError("ts must be positive");
  SampledSignal out;
  out.ts = ts;
  out.samples = std::visit(SampleVisitor{ts, count}, spec);
  if (!body_to_inertial.matrix().isIdentity(0.0)) {
    for (auto& u : out.samples) u = to_inertial(body_to_inertial, u);
  }
  return out;
}

}  // namespace rangeloc
