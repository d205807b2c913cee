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

#include "rangeloc/frames.hpp"

#include <cmath>

#include "rangeloc/errors.hpp"

namespace rangeloc {

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Rotation3::Rotation3(const Mat3& m) : m_(m) {
  if (!is_rotation(m_)) {
    throw PreconditionError("rotation matrix is not orthonormal with det +1");
  }
}

Rotation3 Rotation3::about_axis(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw PreconditionError("rotation axis must be nonzero");
  return Rotation3(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix());
}

Rotation3 Rotation3::from_row_major(std::span<const double> values) {
  if (values.size() != 9) {
    throw PreconditionError("rotation needs 9 values, got " +
                            std::to_string(values.size()));
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = values[static_cast<std::size_t>(3 * r + c)];
  return Rotation3(m);
}

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Vec3 to_inertial(const Rotation3& body_to_inertial, const Vec3& v_body) {
  return body_to_inertial.matrix() * v_body;
}

Vec3 to_inertial(const Mat3& body_to_inertial, const Vec3& v_body) {
  return to_inertial(Rotation3(body_to_inertial), v_body);
}

}  // namespace rangeloc
