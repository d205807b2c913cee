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

#include "rangeloc/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "rangeloc/errors.hpp"

namespace rangeloc {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void put(std::ostream& out, double v) { out << ',' << format_double(v); }

void put(std::ostream& out, const Vec3& v) {
  put(out, v.x());
  put(out, v.y());
  put(out, v.z());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

double parse_cell(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("trace", "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::string open_out_dir(const RunOptions& opts, const std::string& fallback) {
  const std::string dir = opts.out_dir.empty() ? fallback : opts.out_dir;
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_file(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot write '" + path + "'");
  return f;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string vec_str(const Vec3& v) {
  std::ostringstream s;
  s << std::setprecision(9) << "(" << v.x() << ", " << v.y() << ", " << v.z() << ")";
  return s.str();
}

std::string values_str(const Eigen::VectorXd& v) {
  std::ostringstream s;
  s << std::setprecision(6) << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  s << "]";
  return s.str();
}

std::string rank_str(int rank, int dim) {
  return "rank " + std::to_string(rank) + "/" + std::to_string(dim);
}

TruthTrace truth_for(const Scenario& s, const RunOptions& opts) {
  if (!opts.trace_csv) return propagate(s.sim);
  std::ifstream in(*opts.trace_csv);
  if (!in) throw ConfigError("trace", "cannot open '" + *opts.trace_csv + "'");
  TruthTrace t = read_trace_csv(in);
  if (t.model != s.sim.model) throw ConfigError("trace", "model does not match the config");
  t.ts = s.sim.ts;
  t.beacon = s.sim.beacon;
  t.current = s.sim.current;
  t.velocity = sample_input(s.sim.input, s.sim.ts, t.size(), s.sim.body_to_inertial).samples;
  return t;
}

}  // namespace

void write_trace_csv(std::ostream& out, const TruthTrace& trace) {
  const bool current = trace.model == Model::kCurrent;
  out << (current ? "k,t,x1,x2,x3,r1,r2,r3,y_clean,y\n" : "k,t,x1,x2,x3,y_clean,y\n");
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << k;
    put(out, trace.time(k));
    put(out, trace.x[k]);
    if (current) put(out, trace.r[k]);
    put(out, trace.y_clean[k]);
    put(out, trace.y[k]);
    out << '\n';
  }
}

TruthTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace", "empty file");
  TruthTrace t;
  std::size_t cols = 0;
  if (line == "k,t,x1,x2,x3,y_clean,y") {
    t.model = Model::kFree;
    cols = 7;
  } else if (line == "k,t,x1,x2,x3,r1,r2,r3,y_clean,y") {
    t.model = Model::kCurrent;
    cols = 10;
  } else {
    throw ConfigError("trace", "unrecognized header '" + line + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols) {
      throw ConfigError("trace", "line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(cols) + " columns");
    }
    std::vector<double> v(cols);
    for (std::size_t i = 0; i < cols; ++i) v[i] = parse_cell(cells[i], lineno);
    if (t.x.size() == 1) t.ts = v[1];
    t.x.emplace_back(v[2], v[3], v[4]);
    if (t.model == Model::kCurrent) t.r.emplace_back(v[5], v[6], v[7]);
    t.y_clean.push_back(v[cols - 2]);
    t.y.push_back(v[cols - 1]);
  }
  if (t.x.empty()) throw ConfigError("trace", "no samples");
  return t;
}

void write_estimate_csv(std::ostream& out, const EstimateTrace& est) {
  const bool current = est.model == Model::kCurrent;
  out << "k,t,xhat1,xhat2,xhat3,err_norm,trace_P" << (current ? ",vfhat1,vfhat2,vfhat3" : "")
      << '\n';
  for (std::size_t k = 0; k < est.size(); ++k) {
    out << k;
    put(out, static_cast<double>(k) * est.ts);
    put(out, est.xhat[k]);
    put(out, est.err_norm[k]);
    put(out, est.trace_P[k]);
    if (current) put(out, est.vfhat[k]);
    out << '\n';
  }
}

void write_error_csv(std::ostream& out, const EstimateTrace& est, const TruthTrace& truth) {
  const bool current = est.model == Model::kCurrent;
  out << "k,t,err_norm" << (current ? ",vf_err_norm" : "") << '\n';
  for (std::size_t k = 0; k < est.size(); ++k) {
    out << k;
    put(out, static_cast<double>(k) * est.ts);
    put(out, est.err_norm[k]);
    if (current) put(out, (est.vfhat[k] - truth.current).norm());
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << (c ? "," : "") << format_double(m(r, c));
    }
    out << '\n';
  }
}

ObservabilitySummary analyze_observability(const Scenario& s, const TruthTrace& truth) {
  ObservabilitySummary out;
  out.model = s.sim.model;
  out.samples = truth.size();
  out.t_end = truth.time(truth.size() - 1);
  RankOptions rank;
  rank.relative_tol = s.analysis.rank_tol;
  const auto integral = integrate(SampledSignal{truth.ts, truth.velocity});

  if (s.sim.model == Model::kFree) {
    const auto sys = build_regression(truth, integral);
    try {
      out.regression = solve_ls(sys, rank);
    } catch (const PreconditionError&) {
      out.regression.reset();
    }
    out.normal_diagonality = diagonality_ratio(normal_matrix(sys));
    out.gramian = gramian_free(integral, out.t_end, rank);
    const std::vector<double> ybar(sys.ybar.data(), sys.ybar.data() + sys.ybar.size());
    out.x0_gramian = gramian_solve(out.gramian, mu_free(integral, ybar, out.t_end));
  } else {
    out.gramian = gramian_current(integral, out.t_end, rank);
    out.g11 = g11_condition(integral, out.t_end, rank);
  }
  return out;
}

void print_observability(std::ostream& out, const ObservabilitySummary& s) {
  out << std::setprecision(6);
  out << "model: " << (s.model == Model::kFree ? "free" : "current")
      << "  samples: " << s.samples << "  t_end: " << s.t_end << " s\n";
  const auto& g = s.gramian;
  if (s.model == Model::kFree) {
    out << "[discrete regression] ";
    if (s.regression) {
      const auto& r = *s.regression;
      out << rank_str(r.rank, 3) << "  cond(H) = " << r.condition_number
          << "  singular values = " << values_str(r.singular_values) << '\n';
      out << "  H^T H off-diagonal ratio = " << s.normal_diagonality << '\n';
      if (r.identifiable) out << "  x0 (least squares) = " << vec_str(r.x0) << '\n';
    } else {
      out << "fewer than 3 samples, not identifiable\n";
    }
    out << "[continuous Gramian] " << rank_str(g.numerical_rank, 3)
        << "  cond(G) = " << g.condition_number
        << "  eigenvalues = " << values_str(g.eigenvalues) << '\n';
    if (s.x0_gramian) out << "  x0 (G^-1 mu) = " << vec_str(*s.x0_gramian) << '\n';
  } else {
    out << "[8-state Gramian] " << rank_str(g.numerical_rank, 8)
        << "  cond(G) = " << g.condition_number
        << "  eigenvalues = " << values_str(g.eigenvalues) << '\n';
    if (s.g11) {
      out << "[G11 necessary condition] " << rank_str(s.g11->numerical_rank, 3) << "  "
          << (s.g11->observable ? "satisfied" : "violated")
          << "  eigenvalues = " << values_str(s.g11->eigenvalues) << '\n';
    }
  }
  out << "tolerance: " << g.tolerance_used << '\n';
  out << (g.observable ? "OBSERVABLE" : "NOT OBSERVABLE") << " ("
      << rank_str(g.numerical_rank, g.dimension()) << ")\n";
}

Scenario apply_overrides(Scenario s, const RunOptions& opts) {
  if (opts.seed) s.sim.seed = *opts.seed;
  if (opts.rank_tol) {
    if (!(*opts.rank_tol > 0.0)) throw ConfigError("rank-tol", "must be positive");
    s.analysis.rank_tol = *opts.rank_tol;
  }
  if (opts.reanchor_every) s.filter.reanchor_every = *opts.reanchor_every;
  if (opts.joseph_update) s.filter.form = UpdateForm::kJoseph;
  return s;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << m.config_hash;
  j["config_hash"] = hash.str();
  j["seed"] = m.seed;
  j["artifacts"] = m.artifacts;
  j["tool_version"] = m.tool_version;
  j["wall_seconds"] = m.wall_seconds;
  auto f = open_file(path);
  f << j.dump(2) << '\n';
}

namespace {

template <class Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

RunManifest manifest_for(const std::string& command, const Scenario& s) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(s);
  m.seed = s.sim.seed;
  return m;
}

void emit(const std::string& dir, const std::string& name, RunManifest& m,
          const std::function<void(std::ostream&)>& writer) {
  const std::string path = (fs::path(dir) / name).string();
  auto f = open_file(path);
  writer(f);
  m.artifacts.push_back(path);
}

}  // namespace

int cmd_simulate(const Scenario& s, const RunOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const TruthTrace truth = propagate(s.sim);
    const std::string dir = open_out_dir(opts, ".");
    auto m = manifest_for("simulate", s);
    emit(dir, "trace.csv", m, [&](std::ostream& o) { write_trace_csv(o, truth); });
    m.wall_seconds = seconds_since(t0);
    write_manifest((fs::path(dir) / "manifest.json").string(), m);
    log << "wrote " << m.artifacts.front() << " (" << truth.size() << " samples)\n";
    if (truth.diagnostics.clamped > 0) {
      log << "range noise clamped at zero on " << truth.diagnostics.clamped << " samples\n";
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_observability(const Scenario& s, const RunOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const TruthTrace truth = propagate(s.sim);
    const auto summary = analyze_observability(s, truth);
    print_observability(log, summary);
    if (!opts.out_dir.empty()) {
      const std::string dir = open_out_dir(opts, ".");
      auto m = manifest_for("observability", s);
      emit(dir, "gramian.csv", m,
           [&](std::ostream& o) { write_matrix_csv(o, summary.gramian.G); });
      m.wall_seconds = seconds_since(t0);
      write_manifest((fs::path(dir) / "manifest.json").string(), m);
    }
    return static_cast<int>(summary.observable() ? kExitOk : kExitNotObservable);
  });
}

int cmd_estimate(const Scenario& s, const RunOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    if (s.filter.P0.empty()) throw ConfigError("filter", "required for estimate");
    const TruthTrace truth = truth_for(s, opts);
    const EstimateTrace est = run_filter(truth, s.filter);
    const std::string dir = open_out_dir(opts, ".");
    auto m = manifest_for("estimate", s);
    emit(dir, "estimate.csv", m, [&](std::ostream& o) { write_estimate_csv(o, est); });
    m.wall_seconds = seconds_since(t0);
    write_manifest((fs::path(dir) / "manifest.json").string(), m);
    log << std::setprecision(6) << "wrote " << m.artifacts.front() << "\n"
        << "initial position error: " << est.err_norm.front() << " m\n"
        << "final position error:   " << est.err_norm.back() << " m\n";
    if (s.sim.model == Model::kCurrent) {
      log << "final current estimate: " << vec_str(est.vfhat.back()) << " m/s\n";
    }
    return static_cast<int>(kExitOk);
  });
}

ReproduceResult run_reproduction(Experiment which, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = apply_overrides(
      which == Experiment::kFree ? reproduce_free_scenario() : reproduce_current_scenario(),
      opts);
  ReproduceResult r;
  r.truth = propagate(s.sim);
  r.estimate = run_filter(r.truth, s.filter);
  r.seconds = seconds_since(t0);
  return r;
}

int cmd_reproduce(Experiment which, const RunOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const bool free = which == Experiment::kFree;
    const Scenario s = apply_overrides(
        free ? reproduce_free_scenario() : reproduce_current_scenario(), opts);
    const auto r = run_reproduction(which, opts);
    const std::string dir = open_out_dir(opts, free ? "reproduce-free" : "reproduce-current");
    auto m = manifest_for(free ? "reproduce free" : "reproduce current", s);
    emit(dir, "truth.csv", m, [&](std::ostream& o) { write_trace_csv(o, r.truth); });
    emit(dir, "estimate.csv", m, [&](std::ostream& o) { write_estimate_csv(o, r.estimate); });
    emit(dir, "error.csv", m, [&](std::ostream& o) { write_error_csv(o, r.estimate, r.truth); });
    m.wall_seconds = r.seconds;
    write_manifest((fs::path(dir) / "manifest.json").string(), m);

    const auto& e = r.estimate.err_norm;
    const std::size_t last = e.size() - 1;
    log << std::setprecision(6) << "experiment: " << (free ? "free" : "current") << "  samples: "
        << e.size() << "  t_end: " << r.truth.time(last) << " s\n"
        << "position error: initial " << e.front() << " m, at t_end/2 " << e[last / 2]
        << " m, final " << e.back() << " m\n";
    if (!free) {
      log << "current estimate: initial " << vec_str(r.estimate.vfhat.front()) << ", final "
          << vec_str(r.estimate.vfhat.back()) << " (norm " << r.estimate.vfhat.back().norm()
          << " m/s)\n";
    }
    log << "wrote " << m.artifacts.size() << " CSV files to " << dir << " in " << r.seconds
        << " s\n";
    return static_cast<int>(kExitOk);
  });
}

int run_config_command(const std::string& command, const std::string& config_path,
                       const RunOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const Scenario s = apply_overrides(load_config(config_path), opts);
    validate(s);
    if (command == "simulate") return cmd_simulate(s, opts, log);
    if (command == "observability") return cmd_observability(s, opts, log);
    if (command == "estimate") return cmd_estimate(s, opts, log);
    throw ConfigError("command", "unknown command '" + command + "'");
  });
}

}  // namespace rangeloc
