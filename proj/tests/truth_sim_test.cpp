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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "rangeloc/errors.hpp"
#include "rangeloc/estimators.hpp"
#include "rangeloc/truth_sim.hpp"

namespace rangeloc {
namespace {

ScenarioConfig free_config() {
  ScenarioConfig c;
  c.model = Model::kFree;
  c.x0 = Vec3(25, 25, 25);
  c.ts = 1e-2;
  c.steps = 2000;
  c.input = SinusoidInput::from_max_speed(Vec3::Constant(0.5), {1, 2, 3}, 20000, 1e-2);
  return c;
}

ScenarioConfig literature_config(double ts, double duration) {
  ScenarioConfig c;
  c.model = Model::kCurrent;
  c.x0 = Vec3(2, 2, 0);
  c.beacon = Vec3(2, 3, 1);
  c.ts = ts;
  c.steps = static_cast<std::size_t>(std::llround(duration / ts));
  c.input = LiteratureInput{};
  return c;
}

TEST(PropagateFree, InitialOutput) {
  const auto tr = propagate(free_config());
  EXPECT_DOUBLE_EQ(tr.y_clean[0], 1875.0);
  EXPECT_EQ(tr.size(), 2001u);
}

TEST(PropagateFree, ZeroOrderHoldRecursion) {
  const auto cfg = free_config();
  const auto tr = propagate(cfg);
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    EXPECT_LT((tr.x[k + 1] - tr.x[k] - cfg.ts * tr.velocity[k + 1]).norm(), 1e-12);
  }
}

TEST(PropagateFree, ZeroInputKeepsPositionAndOutput) {
  auto cfg = free_config();
  cfg.input = ConstantInput{};
  const auto tr = propagate(cfg);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_EQ(tr.x[k], cfg.x0);
    EXPECT_EQ(tr.y_clean[k], 1875.0);
  }
}

TEST(PropagateFree, DerivedOutputIdentity) {
  const auto cfg = free_config();
  const auto tr = propagate(cfg);
  Vec3 I = Vec3::Zero();
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (k > 0) I += cfg.ts * tr.velocity[k];
    const double lhs = derived_output(DerivedMode::kFreeX0, tr.y_clean[k], tr.y_clean[0], I);
    const double rhs = I.dot(cfg.x0);
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
    const double at_k = derived_output(DerivedMode::kFreeXt, tr.y_clean[k], tr.y_clean[0], I);
    EXPECT_NEAR(at_k, I.dot(tr.x[k]), 1e-9 * std::max(1.0, std::abs(at_k)));
  }
}

// With the zero-order hold, x_k - x(t_k) = (ts/2) (v(t_k) - v(0)) + O(ts^2).
TEST(PropagateCurrent, LiteratureProfileMatchesClosedForm) {
  const double ts = 1.0 / 750.0;
  const auto tr = propagate(literature_config(ts, 4 * M_PI));
  double worst_raw = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = tr.time(k);
    const Vec3 exact(2 + 2 * std::sin(t), 2 * std::cos(2 * t), 2 * std::sin(0.5 * t));
    const Vec3 first_order = 0.5 * ts * (eval_literature_profile(t) - eval_literature_profile(0));
    EXPECT_LT((tr.x[k] - exact - first_order).norm(), 1e-5) << "k=" << k;
    worst_raw = std::max(worst_raw, (tr.x[k] - exact).cwiseAbs().maxCoeff());
  }
  // per axis at most (ts/2) max|v_i(t) - v_i(0)| = 4 ts / 2
  EXPECT_LT(worst_raw, 2.0 * ts + 1e-5);
}

TEST(PropagateCurrent, RangeOutputAndBeaconGeometry) {
  const auto tr = propagate(literature_config(1.0 / 750.0, 1.0));
  EXPECT_DOUBLE_EQ(tr.y_clean[0], 2.0);  // |(2,3,1) - (2,2,0)|^2
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_LT((tr.r[k] - (tr.beacon - tr.x[k])).norm(), 1e-12);
    EXPECT_NEAR(tr.y_clean[k], tr.r[k].squaredNorm(), 1e-12);
  }
}

TEST(PropagateCurrent, PureDriftMovesRelativePosition) {
  ScenarioConfig c = literature_config(0.1, 1.0);
  c.input = ConstantInput{};
  c.current = Vec3(1, 0, 0);
  const auto tr = propagate(c);
  ASSERT_EQ(tr.size(), 11u);
  EXPECT_LT((tr.r[10] - (tr.r[0] - Vec3(1, 0, 0))).norm(), 1e-14);
}

TEST(PropagateCurrent, StateMatchesLinearDynamics) {
  auto c = literature_config(1.0 / 750.0, 2.0);
  c.current = Vec3(0.1, -0.05, 0.02);
  const auto tr = propagate(c);
  const auto sys = LtiSystem8::discretize(c.ts);
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const Vec8 next = sys.Ad * truth_z(tr, k) + sys.Bd * tr.velocity[k + 1];
    EXPECT_LT((truth_z(tr, k + 1) - next).norm(), 1e-9);
  }
}

TEST(PropagateCurrent, OutputIdentity) {
  auto c = literature_config(1.0 / 750.0, 5.0);
  c.current = Vec3(0.05, 0.02, -0.01);
  const auto tr = propagate(c);
  const Vec8 z0 = truth_z(tr, 0);
  Vec3 I = Vec3::Zero();
  for (std::size_t k = 0; k < tr.size(); k += 7) {
    I = Vec3::Zero();
    for (std::size_t j = 1; j <= k; ++j) I += c.ts * tr.velocity[j];
    const double t = tr.time(k);
    const double lhs = derived_output(DerivedMode::kCurrent, tr.y_clean[k], tr.y_clean[0], I);
    const double rhs = output_row_current(I, t) * truth_z(tr, k);
    EXPECT_NEAR(lhs, rhs, 1e-6 * std::max(1.0, std::abs(rhs)));
    // the same output seen from the initial state
    const double from_z0 = observed_row_current(I, t) * z0;
    EXPECT_NEAR(lhs - 2.0 * I.squaredNorm(), from_z0, 1e-6 * std::max(1.0, std::abs(from_z0)));
  }
}

TEST(ScenarioConfig, RejectsCurrentInFreeModel) {
  auto c = free_config();
  c.current = Vec3(0.1, 0, 0);
  EXPECT_THROW(c.validate(), ConfigError);
  c = free_config();
  c.ts = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Measure, DeterministicForSeed) {
  const std::vector<double> y(1000, 100.0);
  NoiseSpec n;
  n.output_var = 1.0;
  const auto a = measure(y, n, 42), b = measure(y, n, 42), c = measure(y, n, 43);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.y, c.y);
}

TEST(Measure, SquaredRangeNoiseVariance) {
  const std::vector<double> y(100000, 50.0);
  NoiseSpec n;
  n.output_var = 1.0;
  const auto m = measure(y, n, 2026);
  double mean = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) mean += m.y[i] - y[i];
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) var += std::pow(m.y[i] - y[i] - mean, 2);
  var /= static_cast<double>(y.size() - 1);
  EXPECT_NEAR(var, 1.0, 0.02);
  EXPECT_NEAR(mean, 0.0, 0.02);
}

TEST(Measure, ZeroVarianceIsNoiseless) {
  const std::vector<double> y{1.0, 2.0, 3.0};
  const auto m = measure(y, NoiseSpec{}, 1);
  EXPECT_EQ(m.y, y);
}

TEST(Measure, RangeDomainClampsNegativeRanges) {
  const std::vector<double> y(2000, 1e-4);  // range 1e-2, noise std 1
  NoiseSpec n;
  n.output_var = 1.0;
  n.apply_to = NoiseDomain::kRange;
  const auto m = measure(y, n, 5);
  EXPECT_GT(m.diagnostics.clamped, 0u);
  for (double v : m.y) EXPECT_GE(v, 0.0);
}

TEST(ProcessNoise, StateNoiseIsReproducible) {
  auto c = free_config();
  c.noise.state_var = {1e-4, 1e-4, 1e-4};
  c.seed = 9;
  const auto a = propagate(c), b = propagate(c);
  EXPECT_EQ(a.x.back(), b.x.back());
  c.noise.state_var = {};
  EXPECT_NE(propagate(c).x.back(), a.x.back());
}

}  // namespace
}  // namespace rangeloc
