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

#include "rangeloc/estimators.hpp"

#include <cmath>

#include "rangeloc/errors.hpp"

namespace rangeloc {

double derived_output(DerivedMode mode, double y, double y_anchor, const Vec3& integral) {
  const double i2 = integral.squaredNorm();
  switch (mode) {
    case DerivedMode::kFreeX0:
      return 0.5 * (y - y_anchor - i2);
    case DerivedMode::kFreeXt:
      return 0.5 * (y - y_anchor + i2);
    case DerivedMode::kCurrent:
      return y - y_anchor + i2;
  }
  return 0.0;
}

DerivedOutput reanchor(const DerivedOutput& current, double y_k, std::size_t k, double ts) {
  DerivedOutput next = current;
  next.y_anchor = y_k;
  next.k_anchor = k;
  next.t_anchor = static_cast<double>(k) * ts;
  return next;
}

Row8 output_row_current(const Vec3& integral, double t) {
  Row8 row = Row8::Zero();
  row.head<3>() = -2.0 * integral.transpose();
  row[3] = -2.0 * t;
  row[4] = t * t;
  return row;
}

LtiSystem8 LtiSystem8::discretize(double ts) {
  LtiSystem8 sys;
  sys.ts = ts;
  sys.A = drift_system_matrix();
  sys.B = drift_input_matrix();
  sys.Ad = Mat8::Identity() + ts * sys.A;
  sys.Bd = ts * sys.B;
  return sys;
}

namespace {

template <int N>
using Mat = Eigen::Matrix<double, N, N>;
template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
Mat<N> checked_inverse(const Mat<N>& m, std::size_t step, const char* what) {
  const Eigen::LLT<Mat<N>> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(step, std::string(what) + " is not positive definite");
  }
  return llt.solve(Mat<N>::Identity());
}

template <int N>
FilterState<N> measurement_update(const Vec<N>& xpred, const Mat<N>& Ppred,
                                  const Vec<N>& c, double ybar, MeasurementNoise R,
                                  UpdateForm form, std::size_t step, StepDiagnostics* diag) {
  const double rinv = R.inverse();
  const double innovation = ybar - c.dot(xpred);
  Mat<N> Ppost;
  Vec<N> K;
  if (form == UpdateForm::kInformation) {
    const Mat<N> info = checked_inverse<N>(Ppred, step, "predicted covariance") +
                        rinv * c * c.transpose();
    Ppost = checked_inverse<N>(info, step, "information matrix");
    K = Ppost * c * rinv;
  } else {
    // Joseph form needs P PD as well.
    checked_inverse<N>(Ppred, step, "predicted covariance");
    if (rinv == 0.0) {
      K.setZero();
      Ppost = Ppred;
    } else {
      const Vec<N> Pc = Ppred * c;
      K = Pc / (c.dot(Pc) + R.R);
      const Mat<N> IKC = Mat<N>::Identity() - K * c.transpose();
      Ppost = IKC * Ppred * IKC.transpose() + R.R * K * K.transpose();
    }
  }

  const double pnorm = Ppost.norm();
  const double asym = pnorm > 0.0 ? (Ppost - Ppost.transpose()).norm() / pnorm : 0.0;
  Ppost = 0.5 * (Ppost + Ppost.transpose());
  if (!Ppost.allFinite() || !std::isfinite(innovation)) {
    throw NumericalError(step, "covariance or innovation is not finite");
  }
  if (Eigen::LLT<Mat<N>>(Ppost).info() != Eigen::Success) {
    throw NumericalError(step, "posterior covariance is not positive definite");
  }
  if (diag != nullptr) {
    diag->innovation = innovation;
    diag->asymmetry = asym;
  }
  FilterState<N> out;
  out.xhat = xpred + K * innovation;
  out.P = Ppost;
  return out;
}

template <int N>
Mat<N> diagonal_matrix(const std::vector<double>& d) {
  Mat<N> m = Mat<N>::Zero();
  for (int i = 0; i < N; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

}  // namespace

FilterState3 kf_free_step(const FilterState3& state, const Vec3& displacement,
                          const Vec3& I_next, double ybar_next, const Mat3& Q,
                          MeasurementNoise R, UpdateForm form, StepDiagnostics* diag) {
  const Vec3 xpred = state.xhat + displacement;
  const Mat3 Ppred = state.P + Q;
  auto out = measurement_update<3>(xpred, Ppred, I_next, ybar_next, R, form, state.k + 1,
                                   diag);
  out.k = state.k + 1;
  return out;
}

FilterState8 kf_current_step(const FilterState8& state, const LtiSystem8& sys,
                             const Vec3& vr, const Row8& C_next, double ybar_next,
                             const Mat8& Q, MeasurementNoise R, UpdateForm form,
                             StepDiagnostics* diag) {
  const Vec8 zpred = sys.Ad * state.xhat + sys.Bd * vr;
  const Mat8 Ppred = sys.Ad * state.P * sys.Ad.transpose() + Q;
  auto out = measurement_update<8>(zpred, Ppred, C_next.transpose(), ybar_next, R, form,
                                   state.k + 1, diag);
  out.k = state.k + 1;
  return out;
}

void FilterSettings::validate(Model model) const {
  const std::size_t dim = model == Model::kFree ? 3 : 8;
  if (P0.size() != dim) {
    throw ConfigError("filter.P0", "expected " + std::to_string(dim) + " entries");
  }
  if (Q.size() != dim) {
    throw ConfigError("filter.Q", "expected " + std::to_string(dim) + " entries");
  }
  for (double p : P0) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("filter.P0", "entries must be > 0");
  }
  for (double q : Q) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw ConfigError("filter.Q", "entries must be >= 0");
  }
  if (!(R > 0.0)) throw ConfigError("filter.R", "must be > 0");
  if (!xhat0.allFinite()) throw ConfigError("filter.xhat0", "must be finite");
  if (!vfhat0.allFinite()) throw ConfigError("filter.vfhat0", "must be finite");
}

FreeLocalizer::FreeLocalizer(const FilterSettings& settings, double ts, double y0)
    : Q_(diagonal_matrix<3>(settings.Q)),
      R_{settings.R},
      form_(settings.form),
      ts_(ts) {
  settings.validate(Model::kFree);
  state_.xhat = settings.xhat0;
  state_.P = diagonal_matrix<3>(settings.P0);
  state_.k = 0;
  anchor_.mode = DerivedMode::kFreeXt;
  anchor_.y_anchor = y0;
}

void FreeLocalizer::step(const Vec3& u_next, double y_next) {
  const Vec3 d = ts_ * u_next;
  integral_ += d;
  const double ybar = derived_output(anchor_.mode, y_next, anchor_.y_anchor, integral_);
  state_ = kf_free_step(state_, d, integral_, ybar, Q_, R_, form_, &diag_);
}

void FreeLocalizer::reanchor(double y_k) {
  anchor_ = rangeloc::reanchor(anchor_, y_k, state_.k, ts_);
  integral_.setZero();
}

CurrentLocalizer::CurrentLocalizer(const FilterSettings& settings, const Vec3& beacon,
                                   double ts, double y0)
    : sys_(LtiSystem8::discretize(ts)),
      Q_(diagonal_matrix<8>(settings.Q)),
      R_{settings.R},
      form_(settings.form),
      beacon_(beacon) {
  settings.validate(Model::kCurrent);
  const Vec3 r0 = beacon - settings.xhat0;
  state_.xhat << r0, r0.dot(settings.vfhat0), settings.vfhat0.squaredNorm(), settings.vfhat0;
  state_.P = diagonal_matrix<8>(settings.P0);
  state_.k = 0;
  anchor_.mode = DerivedMode::kCurrent;
  anchor_.y_anchor = y0;
}

void CurrentLocalizer::step(const Vec3& vr_next, double y_next) {
  integral_ += sys_.ts * vr_next;
  const double t = static_cast<double>(state_.k + 1) * sys_.ts - anchor_.t_anchor;
  const Row8 C = output_row_current(integral_, t);
  const double ybar = derived_output(anchor_.mode, y_next, anchor_.y_anchor, integral_);
  state_ = kf_current_step(state_, sys_, vr_next, C, ybar, Q_, R_, form_, &diag_);
}

// Moving the anchor changes the meaning of z4 from r_old^T v_f to r_new^T v_f.
// With r_new = r_old - dt v_f - I this is the exact linear map
// z4 <- z4 - dt z5 - I^T v_f.
void CurrentLocalizer::reanchor(double y_k) {
  const double dt = static_cast<double>(state_.k) * sys_.ts - anchor_.t_anchor;
  Mat8 J = Mat8::Identity();
  J(3, 4) = -dt;
  J.block<1, 3>(3, 5) = -integral_.transpose();
  state_.xhat = J * state_.xhat;
  state_.P = J * state_.P * J.transpose();
  state_.P = 0.5 * (state_.P + state_.P.transpose()).eval();
  anchor_ = rangeloc::reanchor(anchor_, y_k, state_.k, sys_.ts);
  integral_.setZero();
}

Vec8 truth_z(const TruthTrace& truth, std::size_t k, std::size_t anchor) {
  Vec8 z;
  const Vec3& vf = truth.current;
  z << truth.r[k], truth.r[anchor].dot(vf), vf.squaredNorm(), vf;
  return z;
}

namespace {

template <class Localizer>
void record(EstimateTrace& out, const Localizer& f, const Vec3& xhat, const Vec3& x) {
  out.xhat.push_back(xhat);
  out.err_norm.push_back((xhat - x).norm());
  out.trace_P.push_back(f.state().P.trace());
}

}  // namespace

EstimateTrace run_filter(const TruthTrace& truth, const FilterSettings& settings) {
  const std::size_t n = truth.size();
  if (n == 0 || truth.y.size() != n || truth.velocity.size() != n) {
    throw PreconditionError("run_filter: inconsistent truth trace");
  }
  EstimateTrace out;
  out.model = truth.model;
  out.ts = truth.ts;
  out.xhat.reserve(n);
  out.err_norm.reserve(n);
  out.trace_P.reserve(n);
  out.innovation.reserve(n);
  const std::size_t every = settings.reanchor_every;
  const auto due = [every](std::size_t k) { return every > 0 && k > 0 && k % every == 0; };

  if (truth.model == Model::kFree) {
    FreeLocalizer f(settings, truth.ts, truth.y[0]);
    record(out, f, f.state().xhat, truth.x[0]);
    out.innovation.push_back(0.0);
    for (std::size_t k = 1; k < n; ++k) {
      f.step(truth.velocity[k], truth.y[k]);
      record(out, f, f.state().xhat, truth.x[k]);
      out.innovation.push_back(f.last_step().innovation);
      out.max_asymmetry = std::max(out.max_asymmetry, f.last_step().asymmetry);
      if (due(k)) f.reanchor(truth.y[k]);
    }
  } else {
    CurrentLocalizer f(settings, truth.beacon, truth.ts, truth.y[0]);
    record(out, f, f.position(), truth.x[0]);
    out.vfhat.push_back(f.current());
    out.innovation.push_back(0.0);
    for (std::size_t k = 1; k < n; ++k) {
      f.step(truth.velocity[k], truth.y[k]);
      record(out, f, f.position(), truth.x[k]);
      out.vfhat.push_back(f.current());
      out.innovation.push_back(f.last_step().innovation);
      out.max_asymmetry = std::max(out.max_asymmetry, f.last_step().asymmetry);
      if (due(k)) f.reanchor(truth.y[k]);
    }
  }
  return out;
}

}  // namespace rangeloc
