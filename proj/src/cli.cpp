// Copyright 2026 The ponas-pool Authors
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

#include "ponas/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ponas/artifacts.hpp"
#include "ponas/config.hpp"
#include "ponas/error.hpp"
#include "ponas/random.hpp"
#include "ponas/sim.hpp"
#include "ponas/space.hpp"

namespace ponas {

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int cmd_partition(const std::string& config, std::uint64_t seed, std::size_t miners, const std::string& out_path,
                  std::ostream& out) {
  const SpacePtr space = load_space(config);
  Rng rng(seed);
  const auto subs = partition(space, miners, rng);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < subs.size(); ++i) labels.push_back("S" + std::to_string(i + 1));
  const std::string table = format_table(subs, labels);

  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << table) || !f.flush()) throw std::runtime_error("cannot write " + out_path);
  out << "wrote " << subs.size() << " subspaces to " << out_path << '\n';
  return kExitOk;
}

int cmd_run(const std::string& config, const std::string& out_dir, std::uint64_t seed, int workers,
            std::ostream& out) {
  const Scenario sc = load_scenario(config, seed);
  const RunArtifacts a = run(sc, workers);
  write_artifacts(out_dir, a);

  for (const auto& r : a.rounds) {
    out << "round " << r.round << " task " << r.task << ": best_global " << fixed(r.best_global);
    if (!r.best_miner.empty()) out << " found by " << r.best_miner;
    if (r.height) {
      out << ", block " << *r.height << " won by " << sc.pool_id;
    } else {
      out << ", no block";
    }
    out << '\n';
    if (!r.height) continue;
    out << "  shares";
    for (const auto& s : a.shares) {
      if (s.height == *r.height) out << ' ' << s.party << '=' << fixed(s.amount, 9);
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_validate(const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const auto report = validate_artifacts(out_dir);
  if (!report.ok) {
    err << "validation failed: " << report.invariant << ": " << report.detail << '\n';
    return kExitValidation;
  }
  out << "ok\n";
  return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mining-pool simulator for neural-architecture-search consensus", "ponas"};
  app.require_subcommand(1);

  std::string config, out_path, out_dir;
  std::uint64_t seed = 0;
  std::size_t miners = 0;
  int workers = 1;

  auto* part = app.add_subcommand("partition", "Split a search space among miners");
  part->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  part->add_option("--seed", seed, "Random seed")->required();
  part->add_option("--miners", miners, "Number of subspaces")->required()->check(CLI::PositiveNumber);
  part->add_option("--out", out_path, "Output table")->required();

  auto* runc = app.add_subcommand("run", "Run a scenario and write its artifacts");
  runc->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  runc->add_option("--out-dir", out_dir, "Artifact directory")->required();
  runc->add_option("--seed", seed, "Base seed; mandatory for reproducibility")->required();
  runc->add_option("--workers", workers, "Threads computing episodes")->check(CLI::Range(1, 256));

  auto* val = app.add_subcommand("validate", "Re-check the invariants of written artifacts");
  val->add_option("--out-dir", out_dir, "Artifact directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ponas: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }

  try {
    if (part->parsed()) return cmd_partition(config, seed, miners, out_path, out);
    if (runc->parsed()) return cmd_run(config, out_dir, seed, workers, out);
    return cmd_validate(out_dir, out, err);
  } catch (const ConfigError& e) {
    err << "ponas: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidScenario& e) {
    err << "ponas: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "ponas: " << e.what() << '\n';
    return kExitRuntime;
  }
}

} // namespace ponas
