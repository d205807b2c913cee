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
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rangeloc/frames.hpp"
#include "rangeloc/kernels.hpp"
#include "rangeloc/signals.hpp"
#include "rangeloc/truth_sim.hpp"

namespace rangeloc {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Row8 = Eigen::Matrix<double, 1, 8>;
using Mat83 = Eigen::Matrix<double, 8, 3>;

// Numerical rank settings. Without an override the tolerance is
// max(d, n) * eps * sigma_max, where n counts the samples that built the
// matrix. relative_tol replaces max(d, n) * eps.
struct RankOptions {
  std::optional<double> relative_tol;
  kernels::Exec exec = kernels::Exec::kParallel;

  double tolerance(std::size_t dim, std::size_t samples, double sigma_max) const;
};

// ybar_k = I_k^T x_0 stacked over the samples.
struct RegressionSystem {
  Eigen::MatrixX3d H;
  Eigen::VectorXd ybar;

  std::size_t rows() const { return static_cast<std::size_t>(H.rows()); }
};

// H rows are I_k, ybar_k = (y_k - y_0 - |I_k|^2) / 2.
RegressionSystem build_regression(const TruthTrace& trace, const IntegralTrace& integral);
// Same, from a bare measurement sequence.
RegressionSystem build_regression(const std::vector<double>& y, const IntegralTrace& integral);

enum class LsMethod {
  kOrthogonal,       // SVD
  kNormalEquations,  // (H^T H)^{-1} H^T ybar, kept as a cross-check
};

struct LsResult {
  bool identifiable = false;
  int rank = 0;
  Vec3 x0 = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
  // Orthonormal basis of the unidentifiable directions (3 x (3 - rank)).
  Eigen::MatrixXd kernel;
  Vec3 singular_values = Vec3::Zero();
  double condition_number = 0.0;
  double tolerance_used = 0.0;
};

// Requires at least 3 rows; throws PreconditionError otherwise.
LsResult solve_ls(const RegressionSystem& sys, const RankOptions& opts = {},
                  LsMethod method = LsMethod::kOrthogonal);

// H^T H through the accumulation kernel.
Mat3 normal_matrix(const RegressionSystem& sys,
                   kernels::Exec exec = kernels::Exec::kParallel);
// max |offdiag| / min diag of a symmetric 3x3 matrix; +inf when a diagonal
// entry is not positive.
double diagonality_ratio(const Mat3& m);

struct GramianReport {
  Eigen::MatrixXd G;
  Eigen::VectorXd eigenvalues;  // ascending
  int numerical_rank = 0;
  double condition_number = 0.0;  // +inf when rank deficient
  bool observable = false;
  double tolerance_used = 0.0;

  int dimension() const { return static_cast<int>(G.rows()); }
  // Eigenvectors for eigenvalues at or below the tolerance.
  Eigen::MatrixXd kernel_basis() const;
};

// Rank/eigen analysis of an already integrated symmetric Gramian.
GramianReport analyze_gramian(const Eigen::MatrixXd& G, std::size_t samples,
                              const RankOptions& opts = {});

// G(t) = int_0^t I I^T, composite trapezoid on the trace grid.
GramianReport gramian_free(const IntegralTrace& integral, double t_end,
                           const RankOptions& opts = {});

// mu(t) = int_0^t I ybar.
Vec3 mu_free(const IntegralTrace& integral, const std::vector<double>& ybar, double t_end,
             kernels::Exec exec = kernels::Exec::kParallel);

// x_0 = G^{-1} mu; nullopt when G is rank deficient.
std::optional<Vec3> gramian_solve(const GramianReport& g, const Vec3& mu);

// State and input matrices of z' = A z + B v_r with
// z = (r, r_0^T v_f, |v_f|^2, v_f).
Mat8 drift_system_matrix();
Mat83 drift_input_matrix();

// e^{At} = I + A t, exact because A^2 = 0.
Mat8 exp_At(double t);

// C(t) e^{At} = [-2 I^T, -2t, t^2, 2t I^T].
Row8 observed_row_current(const Vec3& integral, double t);

// 8x8 Gramian of the current model.
GramianReport gramian_current(const IntegralTrace& vr_integral, double t_end,
                              const RankOptions& opts = {});

// G11(t) = 4 int_0^t I I^T; `observable` means the necessary condition holds.
GramianReport g11_condition(const IntegralTrace& vr_integral, double t_end,
                            const RankOptions& opts = {});

}  // namespace rangeloc
