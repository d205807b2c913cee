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

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rangeloc/pipeline.hpp"

namespace {

using rangeloc::RunOptions;

struct CommonFlags {
  std::vector<std::string> configs;
  std::string out;
  std::uint64_t seed = 0;
  double rank_tol = 0.0;
  std::size_t reanchor_every = 0;
  bool joseph = false;
  int jobs = 1;
  std::string trace;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.configs, "Scenario file(s)")->required();
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Override the scenario seed");
  cmd->add_option("--rank-tol", f.rank_tol, "Relative numerical-rank tolerance");
  cmd->add_option("--reanchor-every", f.reanchor_every, "Re-anchor the derived output every K steps");
  cmd->add_flag("--joseph-update", f.joseph, "Covariance-form (Joseph) update");
  cmd->add_option("--jobs", f.jobs, "Run independent scenario files in parallel")
      ->check(CLI::PositiveNumber);
}

bool given(const CLI::App* cmd, const std::string& name) {
  const auto* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RunOptions to_options(const CLI::App* cmd, const CommonFlags& f) {
  RunOptions o;
  o.out_dir = f.out;
  if (given(cmd, "--seed")) o.seed = f.seed;
  if (given(cmd, "--rank-tol")) o.rank_tol = f.rank_tol;
  if (given(cmd, "--reanchor-every")) o.reanchor_every = f.reanchor_every;
  o.joseph_update = f.joseph;
  if (given(cmd, "--trace")) o.trace_csv = f.trace;
  return o;
}

// Each scenario file gets its own output subdirectory when more than one is given.
int run_many(const std::string& command, const CommonFlags& f, const RunOptions& base) {
  const std::size_t n = f.configs.size();
  std::vector<std::string> logs(n);
  std::vector<int> codes(n, 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      RunOptions o = base;
      if (n > 1) {
        const auto stem = std::filesystem::path(f.configs[i]).stem().string();
        o.out_dir = (std::filesystem::path(base.out_dir.empty() ? "." : base.out_dir) / stem).string();
      }
      std::ostringstream log;
      codes[i] = rangeloc::run_config_command(command, f.configs[i], o, log);
      logs[i] = log.str();
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, f.jobs));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, n); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (n > 1) std::cout << "== " << f.configs[i] << '\n';
    std::cout << logs[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-range localization: simulation, observability analysis and Kalman estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rangeloc::kToolVersion);

  CommonFlags sim_flags, obs_flags, est_flags;
  auto* simulate = app.add_subcommand("simulate", "Simulate ground truth and measurements");
  add_common(simulate, sim_flags);
  auto* observability = app.add_subcommand("observability", "Observability report");
  add_common(observability, obs_flags);
  auto* estimate = app.add_subcommand("estimate", "Run the Kalman filter");
  add_common(estimate, est_flags);
  estimate->add_option("--trace", est_flags.trace, "Trace CSV to filter instead of simulating");

  std::string experiment;
  CommonFlags rep_flags;
  auto* reproduce = app.add_subcommand("reproduce", "Reproduce a reference experiment");
  reproduce->add_option("experiment", experiment, "free or current")
      ->required()
      ->check(CLI::IsMember({"free", "current"}));
  reproduce->add_option("--out", rep_flags.out, "Output directory");
  reproduce->add_option("--seed", rep_flags.seed, "Override the seed");
  reproduce->add_option("--reanchor-every", rep_flags.reanchor_every, "Re-anchor every K steps");
  reproduce->add_flag("--joseph-update", rep_flags.joseph, "Covariance-form (Joseph) update");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rangeloc::kExitConfig;
  }

  if (*reproduce) {
    const auto which =
        experiment == "free" ? rangeloc::Experiment::kFree : rangeloc::Experiment::kCurrent;
    return rangeloc::cmd_reproduce(which, to_options(reproduce, rep_flags), std::cout);
  }
  for (auto* cmd : {simulate, observability, estimate}) {
    if (!*cmd) continue;
    const CommonFlags& f = cmd == simulate ? sim_flags : cmd == observability ? obs_flags : est_flags;
    return run_many(cmd->get_name(), f, to_options(cmd, f));
  }
  return rangeloc::kExitConfig;
}
