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

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "rangeloc/frames.hpp"

namespace rangeloc {

// u_i(t) = A_i n_i omega cos(n_i omega t), omega = 2 pi / (n0 ts).
// Distinct harmonics make the integrated signal persistently exciting over
// whole multiples of the base period.
struct SinusoidInput {
  Vec3 amplitude = Vec3::Zero();  // [m]
  std::array<int, 3> harmonics{1, 2, 3};
  int n0 = 1;  // base period in samples
  double ts = 1.0;

  static SinusoidInput from_amplitude(const Vec3& amplitude, std::array<int, 3> harmonics,
                                      int n0, double ts);
  // Amplitudes chosen so that |A_i| n_i omega equals max_speed_i.
  static SinusoidInput from_max_speed(const Vec3& max_speed, std::array<int, 3> harmonics,
                                      int n0, double ts);
  // omega must correspond to an integer n0 for the given ts.
  static int base_period_samples(double omega, double ts);

  double omega() const;
  double base_period() const { return n0 * ts; }
  Vec3 max_speed() const;
  void validate() const;
};

Vec3 eval_sinusoid(const SinusoidInput& s, double t);

// (2 cos t, -4 sin 2t, cos(t/2)) m/s.
Vec3 eval_literature_profile(double t);

struct SampledSignal {
  double ts = 1.0;
  std::vector<Vec3> samples;  // samples[k] = u(k ts)
};

// values[k] = integral of u over [0, k ts] under zero-order hold.
struct IntegralTrace {
  double ts = 1.0;
  std::vector<Vec3> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * ts; }
  // Index of the sample at time t (rounded); throws when outside the trace.
  std::size_t index_at(double t) const;
};

// I_0 = 0, I_{k+1} = I_k + ts u_{k+1}.
IntegralTrace integrate(const SampledSignal& signal);

// Input signal sources accepted in scenario configs.
struct LiteratureInput {};
struct ConstantInput {
  Vec3 value = Vec3::Zero();
};
// Rows of t,ux,uy,uz; sampled with a zero-order hold on the last row with t <= t_k.
struct CsvInput {
  std::string path;
};
using InputSpec = std::variant<SinusoidInput, LiteratureInput, ConstantInput, CsvInput>;

struct TimedSample {
  double t;
  Vec3 u;
};
std::vector<TimedSample> read_input_csv(const std::string& path);

// count samples of the input at t_k = k ts, rotated into the inertial frame.
SampledSignal sample_input(const InputSpec& spec, double ts, std::size_t count,
                           const Rotation3& body_to_inertial = Rotation3::identity());

}  // namespace rangeloc
