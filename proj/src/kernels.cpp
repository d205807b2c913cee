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

#include "rangeloc/kernels.hpp"

#include <algorithm>

#ifdef RANGELOC_HAS_OPENMP
#include <omp.h>
#endif

#include "rangeloc/errors.hpp"

namespace rangeloc::kernels {

namespace {

void check_shapes(const Eigen::MatrixXd& columns, std::size_t weights) {
  if (static_cast<std::size_t>(columns.cols()) != weights) {
    throw PreconditionError("kernel: weight count does not match sample count");
  }
}

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = 0.0;
    return w;
  }
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& columns,
                                     std::span<const double> weights) {
  check_shapes(columns, weights.size());
  const auto d = columns.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    const double w = weights[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < d; ++j) {
      const double cj = w * columns(j, k);
      for (Eigen::Index i = 0; i < d; ++i) g(i, j) += columns(i, k) * cj;
    }
  }
  return g;
}

Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& columns,
                                       std::span<const double> weights) {
  check_shapes(columns, weights.size());
  const auto d = columns.rows();
  const std::size_t n = weights.size();
  const std::size_t blocks = block_count(n);
  std::vector<Eigen::MatrixXd> partial(blocks, Eigen::MatrixXd::Zero(d, d));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    const auto len = static_cast<Eigen::Index>(end - begin);
    const auto block = columns.middleCols(static_cast<Eigen::Index>(begin), len);
    const Eigen::Map<const Eigen::VectorXd> w(weights.data() + begin, len);
    partial[static_cast<std::size_t>(b)].noalias() =
        block * w.asDiagonal() * block.transpose();
  }

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  for (const auto& p : partial) g += p;
  return 0.5 * (g + g.transpose());
}

Eigen::VectorXd weighted_moment_serial(const Eigen::MatrixXd& columns,
                                       std::span<const double> weights,
                                       std::span<const double> values) {
  check_shapes(columns, weights.size());
  check_shapes(columns, values.size());
  Eigen::VectorXd m = Eigen::VectorXd::Zero(columns.rows());
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    m += (weights[i] * values[i]) * columns.col(k);
  }
  return m;
}

Eigen::VectorXd weighted_moment_parallel(const Eigen::MatrixXd& columns,
                                         std::span<const double> weights,
                                         std::span<const double> values) {
  check_shapes(columns, weights.size());
  check_shapes(columns, values.size());
  const auto d = columns.rows();
  const std::size_t n = weights.size();
  const std::size_t blocks = block_count(n);
  std::vector<Eigen::VectorXd> partial(blocks, Eigen::VectorXd::Zero(d));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    const auto len = static_cast<Eigen::Index>(end - begin);
    const Eigen::Map<const Eigen::VectorXd> w(weights.data() + begin, len);
    const Eigen::Map<const Eigen::VectorXd> v(values.data() + begin, len);
    partial[static_cast<std::size_t>(b)].noalias() =
        columns.middleCols(static_cast<Eigen::Index>(begin), len) * w.cwiseProduct(v);
  }

  Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
  for (const auto& p : partial) m += p;
  return m;
}

int max_threads() {
#ifdef RANGELOC_HAS_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace rangeloc::kernels
