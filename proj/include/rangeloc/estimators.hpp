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

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "rangeloc/frames.hpp"
#include "rangeloc/observability.hpp"
#include "rangeloc/truth_sim.hpp"

namespace rangeloc {

// Linear pseudo-measurements built from the squared range.
enum class DerivedMode {
  kFreeX0,   // (y - y_a - |I|^2) / 2 = I^T x_a
  kFreeXt,   // (y - y_a + |I|^2) / 2 = I^T x
  kCurrent,  // y - y_a + |I|^2 = C(t) z
};

// Reference instant for the derived output. I and t are measured from it.
struct DerivedOutput {
  DerivedMode mode = DerivedMode::kFreeXt;
  double y_anchor = 0.0;
  double t_anchor = 0.0;
  std::size_t k_anchor = 0;
};

double derived_output(DerivedMode mode, double y, double y_anchor, const Vec3& integral);

// Moves the anchor to step k: subsequent derived outputs behave as if the
// measurement had started there. The caller resets its running integral.
DerivedOutput reanchor(const DerivedOutput& current, double y_k, std::size_t k, double ts);

// [-2 I^T, -2t, t^2, 0 0 0].
Row8 output_row_current(const Vec3& integral, double t);

// Layout of z: r (0..2), r_0^T v_f (3), |v_f|^2 (4), v_f (5..7).
struct LtiSystem8 {
  Mat8 A;
  Mat83 B;
  Mat8 Ad;   // I + ts A
  Mat83 Bd;  // ts B
  double ts = 0.0;

  static LtiSystem8 discretize(double ts);
};

template <int N>
struct FilterState {
  Eigen::Matrix<double, N, 1> xhat;
  Eigen::Matrix<double, N, N> P;
  std::size_t k = 0;
};
using FilterState3 = FilterState<3>;
using FilterState8 = FilterState<8>;

enum class UpdateForm {
  kInformation,  // (P^-1 + c R^-1 c^T)^-1
  kJoseph,       // (I - K c^T) P (I - K c^T)^T + K R K^T
};

struct StepDiagnostics {
  double innovation = 0.0;
  // |P - P^T| / |P| of the posterior before symmetrization.
  double asymmetry = 0.0;
};

// R = +inf encodes an uninformative measurement (zero gain).
struct MeasurementNoise {
  double R = 1.0;
  double inverse() const { return std::isinf(R) ? 0.0 : 1.0 / R; }
};

// One predict/update cycle of the 3-state filter. displacement is the
// position increment between the two samples, I_next and ybar_next belong to
// the new sample. Throws NumericalError when a covariance loses positive
// definiteness.
FilterState3 kf_free_step(const FilterState3& state, const Vec3& displacement,
                          const Vec3& I_next, double ybar_next, const Mat3& Q,
                          MeasurementNoise R, UpdateForm form = UpdateForm::kInformation,
                          StepDiagnostics* diag = nullptr);

FilterState8 kf_current_step(const FilterState8& state, const LtiSystem8& sys,
                             const Vec3& vr, const Row8& C_next, double ybar_next,
                             const Mat8& Q, MeasurementNoise R,
                             UpdateForm form = UpdateForm::kInformation,
                             StepDiagnostics* diag = nullptr);

// Gain of the information form and of the covariance form, for cross-checks.
template <int N>
Eigen::Matrix<double, N, 1> information_gain(const Eigen::Matrix<double, N, N>& P,
                                             const Eigen::Matrix<double, N, 1>& c, double R) {
  const Eigen::Matrix<double, N, N> info =
      P.inverse() + c * c.transpose() / R;
  return info.llt().solve(c) / R;
}

template <int N>
Eigen::Matrix<double, N, 1> covariance_gain(const Eigen::Matrix<double, N, N>& P,
                                            const Eigen::Matrix<double, N, 1>& c, double R) {
  return P * c / (c.dot(P * c) + R);
}

struct FilterSettings {
  Vec3 xhat0 = Vec3::Zero();
  Vec3 vfhat0 = Vec3::Zero();  // current model only
  std::vector<double> P0;      // diagonal, 3 or 8 entries
  std::vector<double> Q;       // diagonal, 3 or 8 entries
  double R = 1.0;
  UpdateForm form = UpdateForm::kInformation;
  std::size_t reanchor_every = 0;  // 0 = never

  void validate(Model model) const;
};

// 3-state localizer on u and the squared range.
class FreeLocalizer {
 public:
  FreeLocalizer(const FilterSettings& settings, double ts, double y0);

  // Advance to the next sample with its inertial velocity and measurement.
  void step(const Vec3& u_next, double y_next);
  void reanchor(double y_k);

  const FilterState3& state() const { return state_; }
  const DerivedOutput& anchor() const { return anchor_; }
  const Vec3& integral() const { return integral_; }
  const StepDiagnostics& last_step() const { return diag_; }

 private:
  FilterState3 state_;
  Mat3 Q_;
  MeasurementNoise R_;
  UpdateForm form_;
  double ts_;
  DerivedOutput anchor_;
  Vec3 integral_ = Vec3::Zero();
  StepDiagnostics diag_;
};

// 8-state localizer with constant unknown current.
class CurrentLocalizer {
 public:
  CurrentLocalizer(const FilterSettings& settings, const Vec3& beacon, double ts, double y0);

  void step(const Vec3& vr_next, double y_next);
  void reanchor(double y_k);

  const FilterState8& state() const { return state_; }
  Vec3 position() const { return beacon_ - state_.xhat.head<3>(); }
  Vec3 current() const { return state_.xhat.tail<3>(); }
  const DerivedOutput& anchor() const { return anchor_; }
  const StepDiagnostics& last_step() const { return diag_; }

 private:
  FilterState8 state_;
  LtiSystem8 sys_;
  Mat8 Q_;
  MeasurementNoise R_;
  UpdateForm form_;
  Vec3 beacon_;
  DerivedOutput anchor_;
  Vec3 integral_ = Vec3::Zero();
  StepDiagnostics diag_;
};

// Per-sample filter output, row k = estimate after sample k (row 0 is the prior).
struct EstimateTrace {
  Model model = Model::kFree;
  double ts = 0.0;
  std::vector<Vec3> xhat;
  std::vector<Vec3> vfhat;  // current model only
  std::vector<double> err_norm;
  std::vector<double> trace_P;
  std::vector<double> innovation;
  double max_asymmetry = 0.0;

  std::size_t size() const { return xhat.size(); }
};

// Runs the matching filter over a simulated trace. The truth is used only
// for the error column.
EstimateTrace run_filter(const TruthTrace& truth, const FilterSettings& settings);

// Truth z_k with r_0 taken at the given anchor step.
Vec8 truth_z(const TruthTrace& truth, std::size_t k, std::size_t anchor = 0);

}  // namespace rangeloc
