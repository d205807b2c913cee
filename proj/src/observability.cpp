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

#include "rangeloc/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rangeloc/errors.hpp"

namespace rangeloc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Columns I_0..I_K for t_end = K ts.
Eigen::MatrixXd integral_columns(const IntegralTrace& integral, std::size_t last) {
  Eigen::MatrixXd cols(3, static_cast<Eigen::Index>(last + 1));
  for (std::size_t k = 0; k <= last; ++k) {
    cols.col(static_cast<Eigen::Index>(k)) = integral.values[k];
  }
  return cols;
}

}  // namespace

double RankOptions::tolerance(std::size_t dim, std::size_t samples, double sigma_max) const {
  const double scale = relative_tol ? *relative_tol
                                    : static_cast<double>(std::max(dim, samples)) * kEps;
  return scale * sigma_max;
}

RegressionSystem build_regression(const std::vector<double>& y,
                                  const IntegralTrace& integral) {
  if (y.size() != integral.size()) {
    throw PreconditionError("build_regression: measurement and integral lengths differ (" +
                            std::to_string(y.size()) + " vs " +
                            std::to_string(integral.size()) + ")");
  }
  if (y.empty()) throw PreconditionError("build_regression: empty trace");
  const auto n = static_cast<Eigen::Index>(y.size());
  RegressionSystem sys;
  sys.H.resize(n, 3);
  sys.ybar.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& I = integral.values[static_cast<std::size_t>(k)];
    sys.H.row(k) = I.transpose();
    sys.ybar[k] = 0.5 * (y[static_cast<std::size_t>(k)] - y[0] - I.squaredNorm());
  }
  return sys;
}

RegressionSystem build_regression(const TruthTrace& trace, const IntegralTrace& integral) {
  if (std::abs(trace.ts - integral.ts) > 1e-12 * trace.ts) {
    throw PreconditionError("build_regression: trace and integral sampling periods differ");
  }
  return build_regression(trace.y, integral);
}

LsResult solve_ls(const RegressionSystem& sys, const RankOptions& opts, LsMethod method) {
  if (sys.rows() < 3) {
    throw PreconditionError(
        "solve_ls: the discrete-time identifiability condition needs n >= 3 samples, got " +
        std::to_string(sys.rows()));
  }
  if (sys.ybar.size() != sys.H.rows()) {
    throw PreconditionError("solve_ls: H and ybar lengths differ");
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(sys.H),
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
  LsResult out;
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values[0];
  out.tolerance_used = opts.tolerance(3, sys.rows(), smax);
  out.rank = 0;
  for (int i = 0; i < 3; ++i) {
    if (out.singular_values[i] > out.tolerance_used) ++out.rank;
  }
  out.identifiable = out.rank == 3;
  out.condition_number = out.identifiable ? smax / out.singular_values[2] : kInf;
  out.kernel = svd.matrixV().rightCols(3 - out.rank);
  if (!out.identifiable) return out;

  if (method == LsMethod::kOrthogonal) {
    out.x0 = svd.solve(sys.ybar);
  } else {
    const Mat3 hth = sys.H.transpose() * sys.H;
    const Vec3 hty = sys.H.transpose() * sys.ybar;
    out.x0 = hth.inverse() * hty;
  }
  return out;
}

Mat3 normal_matrix(const RegressionSystem& sys, kernels::Exec exec) {
  const Eigen::MatrixXd cols = sys.H.transpose();
  const std::vector<double> ones(sys.rows(), 1.0);
  return kernels::weighted_gram(cols, ones, exec);
}

double diagonality_ratio(const Mat3& m) {
  const double dmin = m.diagonal().minCoeff();
  if (!(dmin > 0.0)) return kInf;
  double off = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) off = std::max(off, std::abs(m(i, j)));
  return off / dmin;
}

Eigen::MatrixXd GramianReport::kernel_basis() const {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const int nullity = dimension() - numerical_rank;
  return es.eigenvectors().leftCols(nullity);
}

GramianReport analyze_gramian(const Eigen::MatrixXd& G, std::size_t samples,
                              const RankOptions& opts) {
  GramianReport rep;
  rep.G = 0.5 * (G + G.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.G, Eigen::EigenvaluesOnly);
  rep.eigenvalues = es.eigenvalues();
  const double lmax = rep.eigenvalues.cwiseAbs().maxCoeff();
  rep.tolerance_used = opts.tolerance(static_cast<std::size_t>(G.rows()), samples, lmax);
  rep.numerical_rank = static_cast<int>(
      (rep.eigenvalues.array() > rep.tolerance_used).count());
  rep.observable = rep.numerical_rank == rep.dimension();
  rep.condition_number = rep.observable ? lmax / rep.eigenvalues[0] : kInf;
  return rep;
}

GramianReport gramian_free(const IntegralTrace& integral, double t_end,
                           const RankOptions& opts) {
  const std::size_t last = integral.index_at(t_end);
  const auto cols = integral_columns(integral, last);
  const auto w = kernels::trapezoid_weights(last + 1, integral.ts);
  return analyze_gramian(kernels::weighted_gram(cols, w, opts.exec), last + 1, opts);
}

Vec3 mu_free(const IntegralTrace& integral, const std::vector<double>& ybar, double t_end,
             kernels::Exec exec) {
  const std::size_t last = integral.index_at(t_end);
  if (ybar.size() < last + 1) {
    throw PreconditionError("mu_free: ybar shorter than the integration window");
  }
  const auto cols = integral_columns(integral, last);
  const auto w = kernels::trapezoid_weights(last + 1, integral.ts);
  return kernels::weighted_moment(cols, w, std::span(ybar.data(), last + 1), exec);
}

std::optional<Vec3> gramian_solve(const GramianReport& g, const Vec3& mu) {
  if (!g.observable || g.dimension() != 3) return std::nullopt;
  const Mat3 G = g.G;
  return Vec3(G.ldlt().solve(mu));
}

Mat8 drift_system_matrix() {
  Mat8 A = Mat8::Zero();
  A.block<3, 3>(0, 5) = -Mat3::Identity();
  return A;
}

Mat83 drift_input_matrix() {
  Mat83 B = Mat83::Zero();
  B.block<3, 3>(0, 0) = -Mat3::Identity();
  return B;
}

Mat8 exp_At(double t) { return Mat8::Identity() + drift_system_matrix() * t; }

Row8 observed_row_current(const Vec3& integral, double t) {
  Row8 row;
  row << -2.0 * integral.transpose(), -2.0 * t, t * t, 2.0 * t * integral.transpose();
  return row;
}

GramianReport gramian_current(const IntegralTrace& vr_integral, double t_end,
                              const RankOptions& opts) {
  const std::size_t last = vr_integral.index_at(t_end);
  Eigen::MatrixXd cols(8, static_cast<Eigen::Index>(last + 1));
  for (std::size_t k = 0; k <= last; ++k) {
    cols.col(static_cast<Eigen::Index>(k)) =
        observed_row_current(vr_integral.values[k], vr_integral.time(k)).transpose();
  }
  const auto w = kernels::trapezoid_weights(last + 1, vr_integral.ts);
  return analyze_gramian(kernels::weighted_gram(cols, w, opts.exec), last + 1, opts);
}

GramianReport g11_condition(const IntegralTrace& vr_integral, double t_end,
                            const RankOptions& opts) {
  const std::size_t last = vr_integral.index_at(t_end);
  const auto cols = integral_columns(vr_integral, last);
  const auto w = kernels::trapezoid_weights(last + 1, vr_integral.ts);
  return analyze_gramian(4.0 * kernels::weighted_gram(cols, w, opts.exec), last + 1, opts);
}

}  // namespace rangeloc
