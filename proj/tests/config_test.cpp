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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "rangeloc/config.hpp"
#include "rangeloc/errors.hpp"

namespace rangeloc {
namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(ParseConfig, MissingTsNamesTheField) {
  try {
    parse_config("model: free\nsteps: 10\nx0: [1, 2, 3]\ninput: {type: literature}\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "ts");
    EXPECT_EQ(std::string(e.what()), "ts: required");
  }
}

TEST(ParseConfig, RejectsBadFields) {
  const std::string base = "model: free\nts: 0.1\nsteps: 10\nx0: [1, 2, 3]\ninput: {type: literature}\n";
  EXPECT_EQ(field_of(base), "");
  EXPECT_EQ(field_of(base + "colour: blue\n"), "colour");
  EXPECT_EQ(field_of("model: free\nts: 0.1\nsteps: 10\nx0: [1, 2]\ninput: {type: literature}\n"), "x0");
  EXPECT_EQ(field_of(base + "noise: {output_var: 1, apply_to: metres}\n"), "noise.apply_to");
  EXPECT_EQ(field_of("model: free\nts: -1\nsteps: 10\ninput: {type: literature}\n"), "ts");
  EXPECT_EQ(field_of("model: boat\nts: 1\nsteps: 10\ninput: {type: literature}\n"), "model");
  EXPECT_EQ(field_of(base + "current: [1, 0, 0]\n"), "current");
  EXPECT_EQ(field_of("model: free\nts: 0.01\nsteps: 10\nx0: [1, 2, 3]\n"
                     "input: {type: sinusoid, harmonics: [1, 1, 2], amplitude: [1, 1, 1], n0: 100}\n"),
            "input.harmonics");
  EXPECT_EQ(field_of("model: free\nts: 0.01\nsteps: 10\nx0: [1, 2, 3]\n"
                     "input: {type: sinusoid, harmonics: [1, 2, 3], amplitude: [1, 1, 1], omega: 1.0}\n"),
            "input.omega");
}

TEST(ParseConfig, DurationSetsSteps) {
  const auto s = parse_config("model: current\nts: 0.5\nduration: 10\nx0: [0, 0, 0]\ninput: {type: literature}\n");
  EXPECT_EQ(s.sim.steps, 20u);
  EXPECT_EQ(s.sim.model, Model::kCurrent);
}

TEST(SerializeConfig, RoundTripIsIdentity) {
  for (const auto& s : {reproduce_free_scenario(), reproduce_current_scenario()}) {
    const std::string text = serialize_config(s);
    const Scenario back = parse_config(text);
    EXPECT_EQ(serialize_config(back), text);
    EXPECT_EQ(config_hash(back), config_hash(s));
    EXPECT_EQ(back.sim.x0, s.sim.x0);
    EXPECT_EQ(back.sim.ts, s.sim.ts);
    EXPECT_EQ(back.sim.steps, s.sim.steps);
    EXPECT_EQ(back.sim.seed, s.sim.seed);
    EXPECT_EQ(back.filter.P0, s.filter.P0);
    EXPECT_EQ(back.filter.Q, s.filter.Q);
  }
}

TEST(SerializeConfig, ShippedConfigsRoundTrip) {
  for (const auto& entry : std::filesystem::directory_iterator(RANGELOC_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    const Scenario s = load_config(entry.path().string());
    EXPECT_NO_THROW(validate(s)) << entry.path();
    EXPECT_EQ(serialize_config(parse_config(serialize_config(s))), serialize_config(s))
        << entry.path();
  }
}

TEST(ConfigHash, ChangesWithContent) {
  auto a = reproduce_free_scenario(), b = a;
  b.sim.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(CsvInput, ResolvedRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "rangeloc_csv_input";
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "u.csv");
    csv << "t,ux,uy,uz\n0,1,0,0\n0.5,0,1,0\n";
  }
  {
    std::ofstream cfg(dir / "s.yaml");
    cfg << "model: free\nts: 0.25\nsteps: 4\nx0: [0, 0, 0]\ninput: {type: csv, path: u.csv}\n";
  }
  const auto s = load_config((dir / "s.yaml").string());
  const auto tr = propagate(s.sim);
  EXPECT_EQ(tr.velocity[1], Vec3(1, 0, 0));
  EXPECT_EQ(tr.velocity[2], Vec3(0, 1, 0));
  EXPECT_EQ(tr.velocity[4], Vec3(0, 1, 0));  // held past the last row
}

}  // namespace
}  // namespace rangeloc
