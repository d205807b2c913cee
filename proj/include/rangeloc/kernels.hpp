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
#include <span>
#include <vector>

#include <Eigen/Dense>

// Accumulation kernels behind the regression and Gramian computations.
// Samples are stored as the columns of a d x n matrix. Each kernel has a
// plain serial reference and an OpenMP version; the parallel version sums
// fixed-size blocks and combines them in block order, so its result does not
// depend on the thread count.
namespace rangeloc::kernels {

enum class Exec { kSerial, kParallel };

inline constexpr std::size_t kBlockSize = 2048;

// Composite trapezoid weights on n equally spaced samples with spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

// sum_k w_k c_k c_k^T over the columns c_k.
Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& columns,
                                     std::span<const double> weights);
Eigen::MatrixXd weighted_gram_parallel(const Eigen::MatrixXd& columns,
                                       std::span<const double> weights);

// sum_k w_k c_k v_k.
Eigen::VectorXd weighted_moment_serial(const Eigen::MatrixXd& columns,
                                       std::span<const double> weights,
                                       std::span<const double> values);
Eigen::VectorXd weighted_moment_parallel(const Eigen::MatrixXd& columns,
                                         std::span<const double> weights,
                                         std::span<const double> values);

inline Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& columns,
                                     std::span<const double> weights, Exec exec) {
  return exec == Exec::kSerial ? weighted_gram_serial(columns, weights)
                               : weighted_gram_parallel(columns, weights);
}

inline Eigen::VectorXd weighted_moment(const Eigen::MatrixXd& columns,
                                       std::span<const double> weights,
                                       std::span<const double> values, Exec exec) {
  return exec == Exec::kSerial ? weighted_moment_serial(columns, weights, values)
                               : weighted_moment_parallel(columns, weights, values);
}

int max_threads();

}  // namespace rangeloc::kernels
