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

#include <span>

#include <Eigen/Dense>

namespace rangeloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kRotationTolerance = 1e-10;

// True when m is orthonormal with determinant +1, both within tol.
bool is_rotation(const Mat3& m, double tol = kRotationTolerance);

// Body-to-inertial rotation. Construction validates SO(3) membership.
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m);

  static Rotation3 identity() { return Rotation3(); }
  static Rotation3 about_axis(const Vec3& axis, double angle);
  // Nine numbers, row-major.
  static Rotation3 from_row_major(std::span<const double> values);

  const Mat3& matrix() const { return m_; }

 private:
  Mat3 m_;
};

// S(a) with S(a) b = a x b.
Mat3 skew(const Vec3& a);

Vec3 to_inertial(const Rotation3& body_to_inertial, const Vec3& v_body);
// Validates m before use; throws PreconditionError when m is not a rotation.
Vec3 to_inertial(const Mat3& body_to_inertial, const Vec3& v_body);

}  // namespace rangeloc
