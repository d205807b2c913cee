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

#include "rangeloc/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rangeloc/errors.hpp"

namespace rangeloc {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const YAML::Node& node, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(join(prefix, key), "unknown field");
  }
}

YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& prefix) {
  const YAML::Node child = node[key];
  if (!child || child.IsNull()) throw ConfigError(join(prefix, key), "required");
  return child;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field, const char* expected) {
  if (!node.IsScalar()) throw ConfigError(field, std::string("expected ") + expected);
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    throw ConfigError(field, std::string("expected ") + expected);
  }
}

double number(const YAML::Node& node, const std::string& field) {
  const double v = scalar<double>(node, field, "a number");
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

std::vector<double> numbers(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(field, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(number(node[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vec3 vec3(const YAML::Node& node, const std::string& field) {
  const auto v = numbers(node, field);
  if (v.size() != 3) throw ConfigError(field, "expected 3 numbers");
  return {v[0], v[1], v[2]};
}

std::string path_relative(const std::string& p, const std::string& base_dir) {
  namespace fs = std::filesystem;
  if (base_dir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

InputSpec parse_input(const YAML::Node& node, double ts, const std::string& base_dir) {
  const std::string prefix = "input";
  if (!node.IsMap()) throw ConfigError(prefix, "expected a section");
  const auto type = scalar<std::string>(require(node, "type", prefix), "input.type", "a string");
  if (type == "literature") {
    reject_unknown(node, prefix, {"type"});
    return LiteratureInput{};
  }
  if (type == "constant") {
    reject_unknown(node, prefix, {"type", "value"});
    return ConstantInput{vec3(require(node, "value", prefix), "input.value")};
  }
  if (type == "csv") {
    reject_unknown(node, prefix, {"type", "path"});
    const auto p = scalar<std::string>(require(node, "path", prefix), "input.path", "a string");
    return CsvInput{path_relative(p, base_dir)};
  }
  if (type != "sinusoid") {
    throw ConfigError("input.type", "expected sinusoid, literature, constant or csv");
  }
  reject_unknown(node, prefix, {"type", "amplitude", "max_speed", "harmonics", "omega", "n0"});

  const auto h = numbers(require(node, "harmonics", prefix), "input.harmonics");
  if (h.size() != 3) throw ConfigError("input.harmonics", "expected 3 integers");
  std::array<int, 3> harmonics{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (h[i] != std::round(h[i]) || h[i] < 1) {
      throw ConfigError("input.harmonics", "expected positive integers");
    }
    harmonics[i] = static_cast<int>(h[i]);
  }

  int n0 = 0;
  if (node["n0"] && node["omega"]) throw ConfigError("input.omega", "give either omega or n0");
  try {
    if (node["n0"]) {
      const double v = number(node["n0"], "input.n0");
      if (v != std::round(v) || v < 1) throw ConfigError("input.n0", "expected a positive integer");
      n0 = static_cast<int>(v);
    } else if (node["omega"]) {
      n0 = SinusoidInput::base_period_samples(number(node["omega"], "input.omega"), ts);
    } else {
      throw ConfigError("input.omega", "required (or input.n0)");
    }
  } catch (const PreconditionError& e) {
    throw ConfigError("input.omega", e.what());
  }

  const bool has_amp = static_cast<bool>(node["amplitude"]);
  const bool has_speed = static_cast<bool>(node["max_speed"]);
  if (has_amp == has_speed) {
    throw ConfigError("input.amplitude", "give exactly one of amplitude or max_speed");
  }
  try {
    return has_amp
               ? SinusoidInput::from_amplitude(vec3(node["amplitude"], "input.amplitude"),
                                               harmonics, n0, ts)
               : SinusoidInput::from_max_speed(vec3(node["max_speed"], "input.max_speed"),
                                               harmonics, n0, ts);
  } catch (const PreconditionError& e) {
    throw ConfigError("input.harmonics", e.what());
  }
}

NoiseSpec parse_noise(const YAML::Node& node) {
  NoiseSpec n;
  if (!node) return n;
  if (!node.IsMap()) throw ConfigError("noise", "expected a section");
  reject_unknown(node, "noise", {"output_var", "apply_to", "state_var"});
  if (node["output_var"]) n.output_var = number(node["output_var"], "noise.output_var");
  if (node["state_var"]) n.state_var = numbers(node["state_var"], "noise.state_var");
  if (node["apply_to"]) {
    const auto a = scalar<std::string>(node["apply_to"], "noise.apply_to", "a string");
    if (a == "squared_range") {
      n.apply_to = NoiseDomain::kSquaredRange;
    } else if (a == "range") {
      n.apply_to = NoiseDomain::kRange;
    } else {
      throw ConfigError("noise.apply_to", "expected squared_range or range");
    }
  }
  n.validate();
  return n;
}

FilterSettings parse_filter(const YAML::Node& node) {
  FilterSettings f;
  if (!node) return f;
  const std::string prefix = "filter";
  if (!node.IsMap()) throw ConfigError(prefix, "expected a section");
  reject_unknown(node, prefix,
                 {"xhat0", "vfhat0", "P0", "Q", "R", "joseph_update", "reanchor_every"});
  f.xhat0 = vec3(require(node, "xhat0", prefix), "filter.xhat0");
  if (node["vfhat0"]) f.vfhat0 = vec3(node["vfhat0"], "filter.vfhat0");
  f.P0 = numbers(require(node, "P0", prefix), "filter.P0");
  f.Q = numbers(require(node, "Q", prefix), "filter.Q");
  f.R = number(require(node, "R", prefix), "filter.R");
  if (node["joseph_update"]) {
    f.form = scalar<bool>(node["joseph_update"], "filter.joseph_update", "true or false")
                 ? UpdateForm::kJoseph
                 : UpdateForm::kInformation;
  }
  if (node["reanchor_every"]) {
    const double v = number(node["reanchor_every"], "filter.reanchor_every");
    if (v < 0 || v != std::round(v)) {
      throw ConfigError("filter.reanchor_every", "expected a non-negative integer");
    }
    f.reanchor_every = static_cast<std::size_t>(v);
  }
  return f;
}

void emit_vec(YAML::Emitter& e, const char* key, const std::vector<double>& v) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << x;
  e << YAML::EndSeq;
}

void emit_vec(YAML::Emitter& e, const char* key, const Vec3& v) {
  emit_vec(e, key, std::vector<double>{v.x(), v.y(), v.z()});
}

}  // namespace

Scenario parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config", std::string("YAML syntax error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config", "expected a mapping at the top level");
  reject_unknown(root, "", {"model", "ts", "steps", "duration", "seed", "x0", "beacon",
                            "current", "rotation", "input", "noise", "filter", "analysis"});

  Scenario s;
  auto& sim = s.sim;
  const auto model = scalar<std::string>(require(root, "model", ""), "model", "a string");
  if (model == "free") {
    sim.model = Model::kFree;
  } else if (model == "current") {
    sim.model = Model::kCurrent;
  } else {
    throw ConfigError("model", "expected free or current");
  }

  sim.ts = number(require(root, "ts", ""), "ts");
  if (!(sim.ts > 0.0)) throw ConfigError("ts", "must be positive");

  if (root["steps"] && root["duration"]) throw ConfigError("steps", "give either steps or duration");
  if (root["steps"]) {
    const double v = number(root["steps"], "steps");
    if (v < 1 || v != std::round(v)) throw ConfigError("steps", "expected a positive integer");
    sim.steps = static_cast<std::size_t>(v);
  } else if (root["duration"]) {
    const double d = number(root["duration"], "duration");
    const double v = std::round(d / sim.ts);
    if (!(v >= 1)) throw ConfigError("duration", "shorter than one sample period");
    sim.steps = static_cast<std::size_t>(v);
  } else {
    throw ConfigError("steps", "required (or duration)");
  }

  if (root["seed"]) {
    const auto seed = scalar<std::string>(root["seed"], "seed", "an unsigned integer");
    try {
      std::size_t used = 0;
      sim.seed = std::stoull(seed, &used);
      if (used != seed.size() || seed.front() == '-') throw std::invalid_argument(seed);
    } catch (const std::exception&) {
      throw ConfigError("seed", "expected an unsigned 64-bit integer");
    }
  }
  sim.x0 = vec3(require(root, "x0", ""), "x0");
  if (root["beacon"]) sim.beacon = vec3(root["beacon"], "beacon");
  if (root["current"]) sim.current = vec3(root["current"], "current");
  if (root["rotation"]) {
    const auto r = numbers(root["rotation"], "rotation");
    if (r.size() != 9) throw ConfigError("rotation", "expected 9 numbers, row-major");
    try {
      sim.body_to_inertial = Rotation3::from_row_major(r);
    } catch (const PreconditionError& e) {
      throw ConfigError("rotation", e.what());
    }
  }
  sim.input = parse_input(require(root, "input", ""), sim.ts, base_dir);
  sim.noise = parse_noise(root["noise"]);
  s.filter = parse_filter(root["filter"]);

  if (const auto a = root["analysis"]) {
    if (!a.IsMap()) throw ConfigError("analysis", "expected a section");
    reject_unknown(a, "analysis", {"rank_tol"});
    if (a["rank_tol"]) {
      const double tol = number(a["rank_tol"], "analysis.rank_tol");
      if (!(tol > 0.0)) throw ConfigError("analysis.rank_tol", "must be positive");
      s.analysis.rank_tol = tol;
    }
  }
  validate(s);
  return s;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
}

void validate(const Scenario& s) {
  s.sim.validate();
  if (s.sim.model == Model::kCurrent && !s.sim.beacon.allFinite()) {
    throw ConfigError("beacon", "must be finite");
  }
  if (!s.filter.P0.empty() || !s.filter.Q.empty()) s.filter.validate(s.sim.model);
}

std::string serialize_config(const Scenario& s) {
  const auto& sim = s.sim;
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "model" << YAML::Value << (sim.model == Model::kFree ? "free" : "current");
  e << YAML::Key << "ts" << YAML::Value << sim.ts;
  e << YAML::Key << "steps" << YAML::Value << sim.steps;
  e << YAML::Key << "seed" << YAML::Value << sim.seed;
  emit_vec(e, "x0", sim.x0);
  emit_vec(e, "beacon", sim.beacon);
  emit_vec(e, "current", sim.current);
  {
    const Mat3& m = sim.body_to_inertial.matrix();
    std::vector<double> rows;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rows.push_back(m(r, c));
    emit_vec(e, "rotation", rows);
  }

  e << YAML::Key << "input" << YAML::Value << YAML::BeginMap;
  std::visit(
      [&e](const auto& in) {
        using T = std::decay_t<decltype(in)>;
        if constexpr (std::is_same_v<T, SinusoidInput>) {
          e << YAML::Key << "type" << YAML::Value << "sinusoid";
          emit_vec(e, "amplitude", in.amplitude);
          e << YAML::Key << "harmonics" << YAML::Value << YAML::Flow << YAML::BeginSeq
            << in.harmonics[0] << in.harmonics[1] << in.harmonics[2] << YAML::EndSeq;
          e << YAML::Key << "n0" << YAML::Value << in.n0;
        } else if constexpr (std::is_same_v<T, LiteratureInput>) {
          e << YAML::Key << "type" << YAML::Value << "literature";
        } else if constexpr (std::is_same_v<T, ConstantInput>) {
          e << YAML::Key << "type" << YAML::Value << "constant";
          emit_vec(e, "value", in.value);
        } else {
          e << YAML::Key << "type" << YAML::Value << "csv";
          e << YAML::Key << "path" << YAML::Value << in.path;
        }
      },
      sim.input);
  e << YAML::EndMap;

  e << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "output_var" << YAML::Value << sim.noise.output_var;
  e << YAML::Key << "apply_to" << YAML::Value
    << (sim.noise.apply_to == NoiseDomain::kSquaredRange ? "squared_range" : "range");
  if (!sim.noise.state_var.empty()) emit_vec(e, "state_var", sim.noise.state_var);
  e << YAML::EndMap;

  if (!s.filter.P0.empty()) {
    const auto& f = s.filter;
    e << YAML::Key << "filter" << YAML::Value << YAML::BeginMap;
    emit_vec(e, "xhat0", f.xhat0);
    emit_vec(e, "vfhat0", f.vfhat0);
    emit_vec(e, "P0", f.P0);
    emit_vec(e, "Q", f.Q);
    e << YAML::Key << "R" << YAML::Value << f.R;
    e << YAML::Key << "joseph_update" << YAML::Value << (f.form == UpdateForm::kJoseph);
    e << YAML::Key << "reanchor_every" << YAML::Value << f.reanchor_every;
    e << YAML::EndMap;
  }
  if (s.analysis.rank_tol) {
    e << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "rank_tol" << YAML::Value << *s.analysis.rank_tol;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

Scenario reproduce_free_scenario() {
  Scenario s;
  auto& sim = s.sim;
  sim.model = Model::kFree;
  sim.ts = 1e-2;
  sim.steps = 6000;
  sim.seed = 2026;
  sim.x0 = Vec3(25, 25, 25);
  const double omega = 1e-2 * std::numbers::pi;
  sim.input = SinusoidInput::from_max_speed(
      Vec3::Constant(0.5), {1, 2, 3}, SinusoidInput::base_period_samples(omega, sim.ts), sim.ts);
  sim.noise.output_var = 1.0;
  s.filter.xhat0 = Vec3(125, 125, 125);
  s.filter.P0 = {1e4, 1e4, 1e4};
  s.filter.Q = {1e-4, 1e-4, 1e-4};
  s.filter.R = 1.0;
  return s;
}

Scenario reproduce_current_scenario() {
  Scenario s;
  auto& sim = s.sim;
  sim.model = Model::kCurrent;
  sim.ts = 1.0 / 750.0;
  sim.steps = 22500;
  sim.seed = 2026;
  sim.x0 = Vec3(2, 2, 0);
  sim.beacon = Vec3(2, 3, 1);
  sim.current = Vec3::Zero();
  sim.input = LiteratureInput{};
  sim.noise.output_var = 1.0;
  s.filter.xhat0 = Vec3(-30, 20, 30);
  s.filter.vfhat0 = Vec3(0.1, -0.1, 0.1);
  s.filter.P0 = {1e3, 1e3, 1e3, 1e2, 1e-2, 0.1, 0.1, 0.1};
  s.filter.Q = {1e-2, 1e-2, 1e-2, 1e-6, 1e-8, 1e-4, 1e-4, 1e-4};
  s.filter.R = 1.0;
  return s;
}

std::uint64_t config_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(s)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rangeloc
