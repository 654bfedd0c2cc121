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

// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "published_tables.hpp"
#include "ponas/artifacts.hpp"
#include "ponas/chain.hpp"
#include "ponas/cli.hpp"
#include "ponas/config.hpp"
#include "ponas/controller.hpp"
#include "ponas/pool.hpp"
#include "ponas/sim.hpp"
#include "ponas/space.hpp"

using namespace ponas;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = PONAS_CONFIG_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

Scenario scenario(const char* name, std::uint64_t seed) { return load_scenario(kConfigs / name, seed); }

// ---- 1 ----------------------------------------------------------------------

bool is_ordered_subset(const std::vector<int>& sub, const std::vector<int>& range) {
  if (sub.empty()) return false;
  std::size_t k = 0;
  for (int v : range)
    if (k < sub.size() && sub[k] == v) ++k;
  return k == sub.size();
}

Verdict partition_correctness() {
  Rng meta(0x5eed0001);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<HyperparameterSpec> specs;
    const auto dims = 1 + meta.below(10);
    for (std::uint64_t d = 0; d < dims; ++d) {
      std::vector<int> r;
      int v = static_cast<int>(meta.below(5)) - 2;
      const auto len = 1 + meta.below(kMaxSubsetRange);
      for (std::uint64_t i = 0; i < len; ++i) {
        r.push_back(v);
        v += 1 + static_cast<int>(meta.below(4));
      }
      specs.emplace_back("h" + std::to_string(d), r);
    }
    const auto space = std::make_shared<const SearchSpace>(specs);
    const auto m = 1 + meta.below(40);
    const auto seed = meta.next();
    Rng a(seed), b(seed);
    const auto p = partition(space, m, a);
    const auto q = partition(space, m, b);
    bool ok = p.size() == m && p == q;
    for (const auto& s : p) {
      ok = ok && s.size() == space->size();
      for (std::size_t j = 0; ok && j < s.size(); ++j) ok = is_ordered_subset(s.range(j), space->spec(j).range());
    }
    if (!ok) ++bad;
  }

  const auto& fx = load_fixture_subspaces();
  const auto& rows = ponas_test::published_rows();
  int mismatched = 0;
  for (std::size_t j = 0; j < fx.full->size(); ++j)
    if (fx.full->spec(j).range() != rows[0].ranges[j]) ++mismatched;
  if (fx.subspaces.size() != 9) ++mismatched;
  for (std::size_t s = 0; s < std::min<std::size_t>(9, fx.subspaces.size()); ++s) {
    if (fx.labels[s] != rows[s + 1].label) ++mismatched;
    for (std::size_t j = 0; j < 10; ++j)
      if (fx.subspaces[s].range(j) != rows[s + 1].ranges[j]) ++mismatched;
  }
  return {bad == 0 && mismatched == 0,
          std::to_string(1000 - bad) + "/1000 triples hold, " + std::to_string(mismatched) + " fixture cells differ"};
}

// ---- 2 ----------------------------------------------------------------------

// Brute force written independently of exhaustive_best.
double brute_max(const Subspace& sub, const LandscapeParams& lp, const HardwareConstraints& hc) {
  const Landscape land(lp);
  double best = 0.0;
  std::vector<std::size_t> idx(sub.size(), 0);
  while (true) {
    Configuration c;
    for (std::size_t i = 0; i < sub.size(); ++i) c.values.push_back(sub.range(i)[idx[i]]);
    const auto est = estimate(c, hc);
    best = std::max(best, est.feasible ? land.reward(c) : 0.0);
    std::size_t i = 0;
    while (i < sub.size() && ++idx[i] == sub.range(i).size()) idx[i++] = 0;
    if (i == sub.size()) return best;
  }
}

Subspace small_subspace(Rng& rng) {
  const auto space = fixture_space();
  for (;;) {
    std::vector<std::vector<int>> ranges;
    for (const auto& spec : space->specs()) {
      const auto& r = spec.range();
      const auto len = 1 + rng.below(std::min<std::uint64_t>(3, r.size()));
      std::vector<std::size_t> pick(r.size());
      for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
      for (std::size_t i = 0; i < len; ++i) std::swap(pick[i], pick[i + rng.below(pick.size() - i)]);
      pick.resize(len);
      std::sort(pick.begin(), pick.end());
      std::vector<int> vals;
      for (auto i : pick) vals.push_back(r[i]);
      ranges.push_back(vals);
    }
    Subspace sub(space, ranges);
    if (sub.cardinality() <= 256 && sub.cardinality() >= 16) return sub;
  }
}

Verdict controller_optimality() {
  Rng meta(0x5eed0002);
  int hit = 0, exceeded = 0;
  const HardwareConstraints hc;
  for (int s = 0; s < 20; ++s) {
    const Subspace sub = small_subspace(meta);
    const LandscapeParams lp{meta.next(), 4, 0.0};
    const auto [cfg, best] = exhaustive_best(sub, lp, hc);
    const double oracle = brute_max(sub, lp, hc);
    if (best != oracle) ++exceeded; // exhaustive_best itself disagrees with the oracle
    Rng rng(meta.next());
    const auto recs = run_search(sub, {5000, kSaturationEpochs}, hc, lp, rng);
    const double found = recs.back().best_so_far;
    if (found > oracle) ++exceeded;
    if (found == oracle) ++hit;
  }
  return {hit >= 18 && exceeded == 0,
          std::to_string(hit) + "/20 optimal, " + std::to_string(exceeded) + " above the exhaustive value"};
}

// ---- 3 and 12 ---------------------------------------------------------------

struct PoolRuns {
  std::vector<RunArtifacts> pool, solo;
};

const PoolRuns& pool_runs() {
  static const PoolRuns runs = [] {
    PoolRuns r;
    for (std::uint64_t s = 1; s <= 20; ++s) {
      r.pool.push_back(run(scenario("pool9.json", s), 4));
      r.solo.push_back(run(scenario("single_full.json", s), 1));
    }
    return r;
  }();
  return runs;
}

Verdict pool_vs_individual() {
  const auto& runs = pool_runs();
  int wins = 0;
  std::vector<double> pool_sum, solo_sum;
  for (std::size_t s = 0; s < runs.pool.size(); ++s) {
    if (runs.pool[s].rounds.at(0).best_global >= runs.solo[s].rounds.at(0).best_global) ++wins;
    const auto pc = runs.pool[s].best_curve(0);
    const auto sc = runs.solo[s].best_curve(0);
    pool_sum.resize(std::max(pool_sum.size(), pc.size()));
    solo_sum.resize(std::max(solo_sum.size(), sc.size()));
    for (std::size_t e = 0; e < pc.size(); ++e) pool_sum[e] += pc[e];
    for (std::size_t e = 0; e < sc.size(); ++e) solo_sum[e] += sc[e];
  }
  const std::size_t n = std::min(pool_sum.size(), solo_sum.size());
  std::size_t lead = 0;
  for (std::size_t e = 0; e < n; ++e)
    if (pool_sum[e] > solo_sum[e]) ++lead;
  const bool ok = wins >= 15 && n == 2000 && 2 * lead >= n;
  return {ok, "pool >= individual in " + std::to_string(wins) + "/20 seeds, leads at " + std::to_string(lead) + "/" +
                  std::to_string(n) + " episodes"};
}

Verdict stddev_shape() {
  const auto& runs = pool_runs();
  int ok = 0;
  for (const auto& a : runs.pool) {
    double early = 0, late = 0;
    int ne = 0, nl = 0;
    for (const auto& r : a.stddev) {
      if (r.point.episode >= 1 && r.point.episode <= 200) early += r.point.stddev, ++ne;
      if (r.point.episode >= 1500 && r.point.episode <= 2000) late += r.point.stddev, ++nl;
    }
    if (ne == 200 && nl == 501 && early / ne > late / nl) ++ok;
  }
  return {ok >= 18, "early mean above late mean in " + std::to_string(ok) + "/20 seeds"};
}

// ---- 4 ----------------------------------------------------------------------

Verdict exploration_exploitation() {
  int geq = 0, gt = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const double naive = run(scenario("weak_naive.json", s), 4).rounds.at(0).best_global;
    const double collab = run(scenario("weak_collab.json", s), 4).rounds.at(0).best_global;
    if (collab >= naive) ++geq;
    if (collab > naive) ++gt;
  }
  return {geq == 20 && gt >= 10,
          "collaborative >= naive in " + std::to_string(geq) + "/20, strictly in " + std::to_string(gt) + "/20"};
}

// ---- 5 ----------------------------------------------------------------------

Verdict weak_budget() {
  const auto a = run(scenario("weak_collab.json", 5), 1);
  std::map<std::string, int> done;
  for (const auto& r : a.episodes) ++done[r.miner];
  const int quota = episode_quota(0.1, 2000);
  const bool ok = done["m10"] == 200 && done["m11"] == 200 && done["m1"] == 2000 && quota == 200 &&
                  completion_ticks(0.1, 2000).size() == 200;
  return {ok, "weak miners completed " + std::to_string(done["m10"]) + " and " + std::to_string(done["m11"]) +
                  " of 2000 episodes"};
}

// ---- 6 ----------------------------------------------------------------------

Configuration cfg(int tag) { return Configuration{{1, 3, 24, 1, 1, 1, 2, tag, 2, 5}}; }

Verdict validation_ordering() {
  const std::vector<Submission> subs = {
      {cfg(1), 0.95, "liar"}, {cfg(2), 0.82, "honest-a"}, {cfg(3), 0.80, "honest-b"}};
  const std::map<int, double> truth = {{1, 0.50}, {2, 0.82}, {3, 0.80}};
  CommitmentSet set;
  for (const auto& s : subs) set.commit({commitment_digest(s.config, s.claimed, s.miner), s.miner}, Phase::Training);
  int calls = 0;
  const Evaluator eval = [&](const Configuration& c) {
    ++calls;
    return truth.at(c[7]);
  };
  const auto out = validate_round(subs, set, eval);
  const bool first = out.block && out.block->winner == "honest-a" && calls == 2 && out.evaluations == 2;

  CommitmentSet partial;
  partial.commit({commitment_digest(subs[1].config, subs[1].claimed, subs[1].miner), subs[1].miner}, Phase::Training);
  const std::vector<Submission> two = {subs[0], subs[1]};
  calls = 0;
  const auto out2 = validate_round(two, partial, eval);
  const bool second = out2.block && out2.block->winner == "honest-a" && calls == 1 && out2.excluded.size() == 1 &&
                      out2.excluded[0] == 0;
  return {first && second, std::string("committed: ") + (first ? "0.82 wins with 2 calls" : "wrong") +
                               "; uncommitted: " + (second ? "excluded with 1 call" : "wrong")};
}

// ---- 7 ----------------------------------------------------------------------

Verdict commitment_deadline() {
  // A commitment sent at the last Training tick with one tick of latency lands
  // at the first Validation tick.
  Phase phase = Phase::Init;
  phase = advance(phase, PhaseEvent::TaskSelected);
  CommitmentSet set;
  const Submission on_time{cfg(2), 0.82, "a"};
  const Submission late{cfg(4), 0.90, "b"};
  const bool accepted =
      set.commit({commitment_digest(on_time.config, on_time.claimed, on_time.miner), on_time.miner}, phase) ==
      CommitResult::Accepted;
  phase = advance(phase, PhaseEvent::BudgetElapsed);
  const bool rejected =
      set.commit({commitment_digest(late.config, late.claimed, late.miner), late.miner}, phase) == CommitResult::Rejected;
  const std::vector<Submission> subs = {late, on_time};
  int calls = 0;
  const auto out = validate_round(subs, set, [&](const Configuration& c) {
    ++calls;
    return c[7] == 4 ? 0.90 : 0.82;
  });
  const bool discarded = out.excluded == std::vector<std::size_t>{0} && out.block && out.block->winner == "a" && calls == 1;
  return {accepted && rejected && discarded && set.size() == 1,
          std::string("late commitment ") + (rejected ? "rejected" : "accepted") + ", its submission " +
              (discarded ? "discarded" : "kept")};
}

// ---- 8 ----------------------------------------------------------------------

Verdict monitor_backup() {
  const auto a = run(scenario("backup.json", 11), 1);
  std::map<int, double> sd;
  for (const auto& r : a.stddev) sd[r.point.episode] = r.point.stddev;
  bool jump = false;
  for (int e = 1000; e <= 1100; ++e)
    if (sd.count(e) && sd.count(e - 1) && sd[e] > sd[e - 1]) jump = true;

  std::string departed, heir;
  bool prepare = false;
  for (const auto& r : a.alerts) {
    if (r.alert.type == AlertType::PrepareBackup && r.alert.episode >= 1000 && r.alert.episode <= 1100) {
      prepare = true;
      if (departed.empty()) departed = r.alert.miner;
    }
    if (r.alert.type == AlertType::BackupPromoted && heir.empty()) heir = r.alert.miner;
  }

  int slot = -1;
  bool gone = !departed.empty();
  for (const auto& r : a.episodes) {
    if (r.miner == departed && r.slot >= 0) slot = r.slot;
    if (r.miner == departed && r.episode > 1000) gone = false;
  }
  bool transferred = false, monotone = slot >= 0;
  double last = -1.0;
  for (const auto& r : a.episodes) {
    if (r.slot != slot || !r.slot_best) continue;
    if (*r.slot_best < last) monotone = false;
    last = *r.slot_best;
    if (r.miner == heir && r.episode > 1000 && !heir.empty()) transferred = true;
  }
  const bool ok = gone && jump && prepare && transferred && monotone && heir == "spare";
  return {ok, "jump " + std::string(jump ? "yes" : "no") + ", PrepareBackup for " +
                  (departed.empty() ? "nobody" : departed) + ", slot " + std::to_string(slot) + " promoted to " +
                  (heir.empty() ? "nobody" : heir) + (monotone ? ", best curve non-decreasing" : ", best curve dropped")};
}

// ---- 9 ----------------------------------------------------------------------

Verdict reward_conservation() {
  Rng rng(0x5eed0009);
  int sum_bad = 0, prop_bad = 0;
  for (int t = 0; t < 10000; ++t) {
    std::map<std::string, std::int64_t> contrib;
    const auto n = 1 + rng.below(30);
    for (std::uint64_t i = 0; i < n; ++i) contrib["m" + std::to_string(i)] = static_cast<std::int64_t>(rng.below(5000));
    contrib["m0"] += 1;
    const double reward = std::ldexp(rng.uniform() + 0.01, static_cast<int>(rng.below(40)) - 20);
    const double fee = 0.5 * rng.uniform();
    const auto share = distribute(contrib, reward, fee);
    if (std::abs(share.total() - reward) > 1e-9 * reward) ++sum_bad;

    long double total = 0;
    for (const auto& [id, c] : contrib) total += c;
    const long double pot = static_cast<long double>(reward) - static_cast<long double>(fee) * reward;
    for (const auto& [id, amount] : share.miners) {
      const long double want = pot * static_cast<long double>(contrib.at(id)) / total;
      if (std::abs(static_cast<long double>(amount) - want) > 1e-12L * pot) ++prop_bad;
    }
  }
  return {sum_bad == 0 && prop_bad == 0,
          std::to_string(sum_bad) + " sums and " + std::to_string(prop_bad) + " shares out of tolerance"};
}

// ---- 10 ---------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream f(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

int cli(std::vector<std::string> args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "ponas_acceptance_determinism";
  fs::remove_all(root);
  int identical = 0, compared = 0;
  for (const char* name : {"multi_block.json", "backup.json", "weak_collab.json"}) {
    const std::string config = (kConfigs / name).string();
    std::vector<std::map<std::string, std::string>> snaps;
    for (const char* workers : {"1", "1", "4"}) {
      const fs::path dir = root / (std::string(name) + "_" + std::to_string(snaps.size()));
      if (cli({"ponas", "run", "--config", config, "--out-dir", dir.string(), "--seed", "42", "--workers", workers}) != 0)
        return {false, std::string("run of ") + name + " failed"};
      snaps.push_back(snapshot(dir));
    }
    compared += 2;
    identical += (snaps[0] == snaps[1]) + (snaps[0] == snaps[2]);
  }
  fs::remove_all(root);
  return {identical == compared, std::to_string(identical) + "/" + std::to_string(compared) +
                                     " artifact directories byte-identical (repeat and 1 vs 4 workers)"};
}

// ---- 11 ---------------------------------------------------------------------

double log_prob(const Policy& p, const Subspace& sub, const Configuration& c) {
  double lp = 0.0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const auto& l = p.logits[i];
    const double mx = *std::max_element(l.begin(), l.end());
    double z = 0.0;
    for (double v : l) z += std::exp(v - mx);
    lp += l[static_cast<std::size_t>(sub.index_of(i, c[i]))] - mx - std::log(z);
  }
  return lp;
}

Verdict gradient_check() {
  Rng rng(0x5eed0011);
  const auto space = fixture_space();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto cells = partition(space, 1, rng);
    const Subspace& sub = cells[0];
    Policy p = Policy::uniform(sub, 0.05 + 0.2 * rng.uniform(), 0.9);
    for (auto& row : p.logits)
      for (auto& v : row) v = 4.0 * rng.uniform() - 2.0;
    p.baseline = rng.uniform();
    Configuration c;
    for (std::size_t i = 0; i < sub.size(); ++i) c.values.push_back(sub.range(i)[rng.below(sub.range(i).size())]);
    double reward = rng.uniform();
    if (std::abs(reward - p.baseline) < 0.05) reward = p.baseline + 0.3;
    const Policy next = update(p, sub, c, reward);
    const double scale = p.learning_rate * (reward - p.baseline);

    for (std::size_t i = 0; i < sub.size(); ++i) {
      for (std::size_t k = 0; k < p.logits[i].size(); ++k) {
        const double h = 1e-5;
        Policy up = p, down = p;
        up.logits[i][k] += h;
        down.logits[i][k] -= h;
        const double fd = scale * (log_prob(up, sub, c) - log_prob(down, sub, c)) / (2 * h);
        const double step = next.logits[i][k] - p.logits[i][k];
        const double err = std::abs(step - fd) / std::max(std::abs(fd), 1e-8);
        if (std::abs(fd) > 1e-8 || std::abs(step) > 1e-8) worst = std::max(worst, err);
      }
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "worst relative error %.2e over 100 cases", worst);
  return {worst <= 1e-4, buf};
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s; // 0: no runtime bound
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> all = {
      {1, "partition correctness", 10, partition_correctness},
      {2, "controller optimality on small spaces", 60, controller_optimality},
      {3, "pool vs individual miner", 300, pool_vs_individual},
      {4, "exploration/exploitation benefit", 180, exploration_exploitation},
      {5, "weak-miner budget", 0, weak_budget},
      {6, "validation ordering", 0, validation_ordering},
      {7, "commitment deadline", 0, commitment_deadline},
      {8, "monitor and backup promotion", 0, monitor_backup},
      {9, "reward conservation", 0, reward_conservation},
      {10, "end-to-end determinism", 0, determinism},
      {11, "gradient check", 0, gradient_check},
      {12, "std-dev convergence shape", 0, stddev_shape},
  };

  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      v.pass = false;
      v.detail += " (over the time limit)";
    }
    if (!v.pass) ++failed;
    std::printf("criterion %2d %-40s %s  %s [%.1fs]\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
