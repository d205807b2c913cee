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
#include <random>

#include <gtest/gtest.h>

#include "rangeloc/errors.hpp"
#include "rangeloc/observability.hpp"
#include "test_support.hpp"

namespace rangeloc {
namespace {

using testing::RandomInput;

struct FreeRun {
  TruthTrace truth;
  IntegralTrace integral;
};

FreeRun free_run(const SampledSignal& u, const Vec3& x0) {
  FreeRun r;
  r.integral = integrate(u);
  r.truth.ts = u.ts;
  r.truth.velocity = u.samples;
  for (const auto& I : r.integral.values) {
    r.truth.x.push_back(x0 + I);
    r.truth.y_clean.push_back((x0 + I).squaredNorm());
  }
  r.truth.y = r.truth.y_clean;
  return r;
}

TEST(BuildRegression, HandExample) {
  // x0 = (1,0,0), u = (1,0,0), ts = 1: I_1 = (1,0,0), y_1 = 4, y_0 = 1
  SampledSignal u{1.0, {Vec3(1, 0, 0), Vec3(1, 0, 0)}};
  const auto run = free_run(u, Vec3(1, 0, 0));
  EXPECT_DOUBLE_EQ(run.truth.y[1], 4.0);
  const auto sys = build_regression(run.truth, run.integral);
  EXPECT_EQ(sys.H.row(1), Eigen::RowVector3d(1, 0, 0));
  EXPECT_DOUBLE_EQ(sys.ybar[1], 1.0);
  EXPECT_DOUBLE_EQ(sys.ybar[0], 0.0);
}

TEST(BuildRegression, RejectsMismatchedLengths) {
  IntegralTrace I{1.0, std::vector<Vec3>(4, Vec3::Zero())};
  EXPECT_THROW(build_regression(std::vector<double>(3, 0.0), I), PreconditionError);
}

TEST(SolveLs, RecoversInitialPositionFromNoiselessSinusoid) {
  const auto s = SinusoidInput::from_max_speed(Vec3::Constant(0.5), {1, 2, 3}, 20000, 1e-2);
  const auto run = free_run(sample_input(s, s.ts, 6001), Vec3(25, 25, 25));
  const auto sys = build_regression(run.truth, run.integral);
  const auto ls = solve_ls(sys);
  ASSERT_TRUE(ls.identifiable);
  EXPECT_EQ(ls.rank, 3);
  EXPECT_LT((ls.x0 - Vec3(25, 25, 25)).norm() / Vec3(25, 25, 25).norm(), 1e-9);
  const Vec3 ref = testing::reference_ls(sys.H, sys.ybar);
  EXPECT_LT((ls.x0 - ref).norm(), 1e-8);
  const auto ne = solve_ls(sys, {}, LsMethod::kNormalEquations);
  EXPECT_LT((ne.x0 - ls.x0).norm(), 1e-6);
}

TEST(SolveLs, NeedsThreeSamples) {
  RegressionSystem sys;
  sys.H = Eigen::MatrixX3d::Identity(2, 3);
  sys.ybar = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(solve_ls(sys), PreconditionError);
}

TEST(SolveLs, IdentityRowsReturnTheData) {
  RegressionSystem sys;
  sys.H = Eigen::MatrixX3d::Identity(3, 3);
  sys.ybar = Eigen::Vector3d(1, 2, 3);
  const auto ls = solve_ls(sys);
  ASSERT_TRUE(ls.identifiable);
  EXPECT_LT((ls.x0 - Vec3(1, 2, 3)).norm(), 1e-14);
  EXPECT_NEAR(ls.condition_number, 1.0, 1e-14);
}

TEST(SolveLs, SingleAxisInputLeavesTwoDimensionalKernel) {
  SampledSignal u{0.01, {}};
  for (int k = 0; k < 500; ++k) u.samples.push_back(Vec3(std::cos(0.01 * k), 0, 0));
  const auto run = free_run(u, Vec3(3, -1, 2));
  const auto ls = solve_ls(build_regression(run.truth, run.integral));
  EXPECT_FALSE(ls.identifiable);
  EXPECT_EQ(ls.rank, 1);
  ASSERT_EQ(ls.kernel.cols(), 2);
  // kernel is span{e2, e3}
  EXPECT_LT(ls.kernel.row(0).norm(), 1e-12);
  EXPECT_NEAR(std::abs((ls.kernel.transpose() * ls.kernel).determinant()), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(ls.condition_number));
}

TEST(GramianFree, ZeroInputIsRankZero) {
  IntegralTrace I{0.1, std::vector<Vec3>(101, Vec3::Zero())};
  const auto g = gramian_free(I, 10.0);
  EXPECT_EQ(g.numerical_rank, 0);
  EXPECT_FALSE(g.observable);
}

TEST(GramianFree, MatchesTrapezoidOracleAndSolvesForX0) {
  std::mt19937_64 rng(1);
  const auto in = testing::random_input(rng, 3);
  const double ts = 1e-2;
  const auto run = free_run(testing::sample(in, ts, 3001), Vec3(4, -7, 11));
  const auto g = gramian_free(run.integral, 30.0);
  const Eigen::MatrixXd ref = testing::reference_trapezoid(
      3001, ts, 3, 3, [&](std::size_t k) -> Eigen::MatrixXd {
        return run.integral.values[k] * run.integral.values[k].transpose();
      });
  EXPECT_LT((g.G - ref).norm(), 1e-12 * ref.norm());
  EXPECT_TRUE(g.observable);

  std::vector<double> ybar;
  for (std::size_t k = 0; k < run.truth.size(); ++k) {
    ybar.push_back(0.5 * (run.truth.y[k] - run.truth.y[0] - run.integral.values[k].squaredNorm()));
  }
  const auto x0 = gramian_solve(g, mu_free(run.integral, ybar, 30.0));
  ASSERT_TRUE(x0.has_value());
  EXPECT_LT((*x0 - Vec3(4, -7, 11)).norm() / Vec3(4, -7, 11).norm(), 1e-6);
}

TEST(GramianFree, IsMonotoneInTheHorizon) {
  std::mt19937_64 rng(5);
  const auto in = testing::random_input(rng, 2);
  const auto I = integrate(testing::sample(in, 0.01, 2001));
  Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(3, 3);
  for (double t : {2.0, 5.0, 10.0, 20.0}) {
    const auto G = gramian_free(I, t).G;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G - prev);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * G.norm());
    prev = G;
  }
}

// Regression rank and Gramian rank agree on random inputs of rank 1, 2 and 3.
TEST(Observability, DiscreteAndContinuousTestsAgree) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 60; ++trial) {
    const int rank = 1 + trial % 3;
    const auto in = testing::random_input(rng, rank);
    const auto run = free_run(testing::sample(in, 0.01, 1501), Vec3(1, 2, 3));
    const auto ls = solve_ls(build_regression(run.truth, run.integral));
    const auto g = gramian_free(run.integral, 15.0);
    EXPECT_EQ(ls.rank, rank) << "trial " << trial;
    EXPECT_EQ(g.numerical_rank, rank) << "trial " << trial;
    EXPECT_EQ(ls.identifiable, g.observable);
  }
}

TEST(Observability, KernelDirectionsAreIndistinguishable) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = testing::random_input(rng, 2);
    const Vec3 x0(5, -3, 8);
    const auto u = testing::sample(in, 0.01, 1001);
    const auto g = gramian_free(integrate(u), 10.0);
    ASSERT_EQ(g.numerical_rank, 2);
    const Vec3 n = g.kernel_basis().col(0);
    const Vec3 mirror = -2.0 * x0.dot(n) * n;
    const auto a = free_run(u, x0), b = free_run(u, x0 + mirror);
    for (std::size_t k = 0; k < a.truth.size(); ++k) {
      EXPECT_NEAR(a.truth.y[k], b.truth.y[k], 1e-9 * a.truth.y[k]);
    }
  }
}

TEST(ExpAt, MatchesSeriesAndSemigroup) {
  const Mat8 A = drift_system_matrix();
  EXPECT_EQ(A * A, Mat8::Zero());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(-100.0, 100.0);
  for (int i = 0; i < 100; ++i) {
    const double a = t(rng), b = t(rng);
    EXPECT_LE(testing::max_abs(exp_At(a) * exp_At(b) - exp_At(a + b)), 1e-14 * (1 + std::abs(a + b)));
    EXPECT_LE(testing::max_abs(exp_At(a) - (Mat8::Identity() + a * A)), 0.0);
  }
}

TEST(ExpAt, ObservedRowIsOutputRowTimesTransition) {
  const Vec3 I(0.3, -1.2, 2.0);
  const double t = 2.5;
  Row8 c = Row8::Zero();
  c.head<3>() = -2.0 * I.transpose();
  c[3] = -2.0 * t;
  c[4] = t * t;
  EXPECT_LT((observed_row_current(I, t) - c * exp_At(t)).norm(), 1e-14);
}

TEST(GramianCurrent, ZeroRelativeVelocityIsRankTwo) {
  IntegralTrace I{0.01, std::vector<Vec3>(1001, Vec3::Zero())};
  const double T = 10.0;
  const auto g = gramian_current(I, T);
  EXPECT_EQ(g.numerical_rank, 2);
  // closed-form 2x2 block: int 4 t^2, int -2 t^3, int t^4
  const double rel = 1e-4;
  EXPECT_NEAR(g.G(3, 3), 4 * std::pow(T, 3) / 3, rel * 4 * std::pow(T, 3) / 3);
  EXPECT_NEAR(g.G(3, 4), -std::pow(T, 4) / 2, rel * std::pow(T, 4) / 2);
  EXPECT_NEAR(g.G(4, 4), std::pow(T, 5) / 5, rel * std::pow(T, 5) / 5);
}

TEST(GramianCurrent, LiteratureProfileIsObservable) {
  const double ts = 1.0 / 750.0;
  const auto n = static_cast<std::size_t>(std::llround(4 * M_PI / ts)) + 1;
  const auto I = integrate(sample_input(LiteratureInput{}, ts, n));
  const auto g = gramian_current(I, static_cast<double>(n - 1) * ts);
  EXPECT_EQ(g.numerical_rank, 8);
  EXPECT_TRUE(g.observable);
}

TEST(GramianCurrent, PlanarInputLeavesNormalDirectionUnobservable) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = testing::random_input(rng, 2);
    const double ts = 0.01;
    const auto I = integrate(testing::sample(in, ts, 2001));
    const auto g = gramian_current(I, 20.0);
    const Vec3 n = in.normal();
    Vec8 z = Vec8::Zero();
    z.head<3>() = 0.7 * n;
    z.tail<3>() = -1.3 * n;
    EXPECT_LE(z.dot(g.G * z), 1e-9 * g.G.norm() * z.squaredNorm());
    EXPECT_LT(g.numerical_rank, 8);
  }
  // v_r3 = 0
  SampledSignal u{0.01, {}};
  for (int k = 0; k < 2001; ++k) u.samples.push_back(Vec3(std::cos(0.01 * k), std::sin(0.023 * k), 0));
  const auto g = gramian_current(integrate(u), 20.0);
  Vec8 z = Vec8::Zero();
  z[2] = 1.0;
  z[7] = 2.0;
  EXPECT_LE(z.dot(g.G * z), 1e-9 * g.G.norm());
}

TEST(G11, IsFourTimesTheFreeGramian) {
  std::mt19937_64 rng(12);
  const auto in = testing::random_input(rng, 3);
  const auto I = integrate(testing::sample(in, 0.01, 1001));
  const auto g11 = g11_condition(I, 10.0);
  const auto gf = gramian_free(I, 10.0);
  EXPECT_LT((g11.G - 4.0 * gf.G).norm(), 1e-13 * g11.G.norm());
  const auto full = gramian_current(I, 10.0);
  EXPECT_LT((full.G.topLeftCorner(3, 3) - g11.G).norm(), 1e-12 * g11.G.norm());
}

TEST(G11, FullRankImpliesG11FullRank) {
  std::mt19937_64 rng(99);
  int full_rank_cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = testing::random_input(rng, 1 + trial % 3);
    const auto I = integrate(testing::sample(in, 0.02, 751));
    const auto full = gramian_current(I, 15.0);
    const auto g11 = g11_condition(I, 15.0);
    if (full.numerical_rank == 8) {
      ++full_rank_cases;
      EXPECT_EQ(g11.numerical_rank, 3) << "trial " << trial;
    }
  }
  EXPECT_GT(full_rank_cases, 0);
}

TEST(RankOptions, RelativeOverride) {
  RankOptions o;
  EXPECT_DOUBLE_EQ(o.tolerance(3, 100, 2.0), 100 * std::numeric_limits<double>::epsilon() * 2.0);
  o.relative_tol = 1e-3;
  EXPECT_DOUBLE_EQ(o.tolerance(3, 100, 2.0), 2e-3);
}

}  // namespace
}  // namespace rangeloc
