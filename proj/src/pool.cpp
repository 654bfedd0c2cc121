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

#include "ponas/pool.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <string>

#include "ponas/error.hpp"

namespace ponas {

std::string_view to_string(Role r) {
  switch (r) {
  case Role::Explorer: return "explorer";
  case Role::Exploiter: return "exploiter";
  case Role::Backup: return "backup";
  }
  return "?";
}

std::string_view to_string(AlertType t) {
  switch (t) {
  case AlertType::PrepareBackup: return "PrepareBackup";
  case AlertType::BackupPromoted: return "BackupPromoted";
  case AlertType::BackupUnavailable: return "BackupUnavailable";
  }
  return "?";
}

void MinerProfile::validate() const {
  if (id.empty()) throw InvalidScenario("miner id must not be empty");
  for (unsigned char c : id) {
    if (!(std::isalnum(c) || c == '_' || c == '-' || c == '.'))
      throw InvalidScenario("miner id '" + id + "' may only use letters, digits, '_', '-', '.'");
  }
  if (!(strength > 0.0 && strength <= 1.0))
    throw InvalidScenario("miner " + id + ": strength must lie in (0, 1]");
}

MinerProfile& PoolState::miner(std::string_view id) {
  for (auto& m : miners)
    if (m.id == id) return m;
  throw UnknownMiner("unknown miner " + std::string(id));
}

const MinerProfile& PoolState::miner(std::string_view id) const {
  for (const auto& m : miners)
    if (m.id == id) return m;
  throw UnknownMiner("unknown miner " + std::string(id));
}

bool PoolState::has_miner(std::string_view id) const {
  return std::any_of(miners.begin(), miners.end(), [&](const MinerProfile& m) { return m.id == id; });
}

double PoolState::miner_best(std::string_view id) const {
  auto it = per_miner_best.find(std::string(id));
  if (it == per_miner_best.end() || it->second.empty()) return 0.0;
  return it->second.back();
}

double PoolState::live_value(std::size_t slot) const {
  const Slot& s = slots.at(slot);
  if (!s.holder) return 0.0;
  return s.search.best_reward();
}

namespace {

bool is_explorer(const MinerProfile& m, WeakPolicy policy) {
  if (!m.online || m.role == Role::Backup) return false;
  return m.strong() || policy == WeakPolicy::Naive;
}

// Strong miners first, then (naive only) weak ones, each in roster order.
std::vector<std::size_t> explorer_order(const std::vector<MinerProfile>& miners, WeakPolicy policy) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < miners.size(); ++i)
    if (is_explorer(miners[i], policy) && miners[i].strong()) out.push_back(i);
  for (std::size_t i = 0; i < miners.size(); ++i)
    if (is_explorer(miners[i], policy) && !miners[i].strong()) out.push_back(i);
  return out;
}

void check_roster(const std::vector<MinerProfile>& miners) {
  std::set<std::string> ids;
  bool any_strong = false;
  for (const auto& m : miners) {
    m.validate();
    if (!ids.insert(m.id).second) throw InvalidScenario("duplicate miner id " + m.id);
    if (m.online && m.role != Role::Backup && m.strong()) any_strong = true;
  }
  if (!any_strong) throw NoStrongMiners("at least one online strong miner is required");
}

} // namespace

PoolState assign_subspaces(std::vector<Subspace> cells, std::vector<MinerProfile> miners, const AssignOptions& options) {
  check_roster(miners);
  const auto order = explorer_order(miners, options.policy);
  if (cells.size() != order.size())
    throw InvalidScenario(std::to_string(cells.size()) + " subspaces for " + std::to_string(order.size()) +
                          " searching miners");

  PoolState state;
  for (auto& m : miners) {
    if (m.role != Role::Backup) m.role = m.strong() ? Role::Explorer : Role::Exploiter;
  }
  for (std::size_t j = 0; j < order.size(); ++j) {
    MinerProfile& m = miners[order[j]];
    m.role = Role::Explorer;
    MinerSearch search(cells[j], derive_seed(options.search_seed, j), options.learning_rate, options.baseline_decay);
    state.slots.push_back(Slot{std::move(cells[j]), std::move(search), m.id, m.id});
    state.assignments[m.id] = j;
  }
  for (const auto& m : miners) {
    state.contribution[m.id] = 0;
    state.per_miner_best[m.id];
  }
  state.miners = std::move(miners);
  return state;
}

std::size_t explorer_count(const std::vector<MinerProfile>& miners, WeakPolicy policy) {
  return explorer_order(miners, policy).size();
}

PoolState assign(const SpacePtr& space, std::vector<MinerProfile> miners, Rng& rng, const AssignOptions& options) {
  check_roster(miners);
  const auto count = explorer_order(miners, options.policy).size();
  return assign_subspaces(partition(space, count, rng), std::move(miners), options);
}

Configuration exploit_step(const Configuration& best, const SearchSpace& full_space, Rng& rng) {
  if (best.size() != full_space.size())
    throw ArityMismatch("configuration has " + std::to_string(best.size()) + " values, space has " +
                        std::to_string(full_space.size()));

  struct Move {
    std::size_t field;
    std::optional<int> lower, upper;
  };
  std::vector<Move> moves;
  for (std::size_t i = 0; i < best.size(); ++i) {
    const auto& range = full_space.spec(i).range();
    const int v = best[i];
    Move m{i, std::nullopt, std::nullopt};
    auto lo = std::lower_bound(range.begin(), range.end(), v);
    if (lo != range.begin()) m.lower = *(lo - 1);
    auto hi = std::upper_bound(range.begin(), range.end(), v);
    if (hi != range.end()) m.upper = *hi;
    if (m.lower || m.upper) moves.push_back(m);
  }
  if (moves.empty()) return best;

  const Move& m = moves[rng.below(moves.size())];
  Configuration out = best;
  if (m.lower && m.upper) {
    out.values[m.field] = rng.below(2) == 0 ? *m.lower : *m.upper;
  } else {
    out.values[m.field] = m.lower ? *m.lower : *m.upper;
  }
  return out;
}

bool collect(PoolState& state, const EpisodeRecord& record, std::string_view miner) {
  if (!state.has_miner(miner)) throw UnknownMiner("unknown miner " + std::string(miner));
  const std::string id(miner);
  state.contribution[id] += 1;
  auto& series = state.per_miner_best[id];
  series.push_back(std::max(series.empty() ? 0.0 : series.back(), record.reward));

  if (state.best_config && !(record.reward > state.best_reward)) return false;
  state.best_config = record.config;
  state.best_reward = record.reward;
  state.best_miner = id;
  return true;
}

std::vector<Alert> monitor(PoolState& state, int episode, const MonitorOptions& options) {
  const std::size_t n = state.slots.size();
  std::vector<double> bests(n);
  for (std::size_t j = 0; j < n; ++j) bests[j] = state.slots[j].search.best_reward();

  auto sorted = bests;
  std::sort(sorted.begin(), sorted.end());
  double median = 0.0;
  if (n > 0) median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  std::vector<std::size_t> high;
  for (std::size_t j = 0; j < n; ++j)
    if (bests[j] >= median) high.push_back(j);
  if (high.size() < 2) throw TooFewMiners("monitor needs at least two high-reward miners");

  double mean = 0.0;
  for (auto j : high) mean += state.live_value(j);
  mean /= static_cast<double>(high.size());
  double var = 0.0;
  for (auto j : high) {
    const double d = state.live_value(j) - mean;
    var += d * d;
  }
  const double sd = std::sqrt(var / static_cast<double>(high.size()));
  state.stddev_series.push_back({episode, sd, static_cast<int>(high.size())});

  std::vector<Alert> alerts;
  const auto prev = state.last_stddev;
  state.last_stddev = sd;
  if (episode < options.warmup || !(sd > options.threshold)) return alerts;
  if (prev && *prev > options.threshold && !(sd - *prev > options.threshold)) return alerts;

  std::size_t weakest = high.front();
  for (auto j : high)
    if (state.live_value(j) < state.live_value(weakest)) weakest = j;
  const Slot& s = state.slots[weakest];
  alerts.push_back({episode, AlertType::PrepareBackup, s.holder ? *s.holder : s.last_holder});
  return alerts;
}

std::string promote_backup(PoolState& state, std::string_view departed, const std::vector<MinerProfile>& backups) {
  std::optional<std::size_t> slot;
  for (std::size_t j = 0; j < state.slots.size(); ++j) {
    const Slot& s = state.slots[j];
    if (!s.holder && s.last_holder == departed) slot = j;
  }
  if (!slot) throw UnknownMiner(std::string(departed) + " holds no vacated subspace");

  const MinerProfile* chosen = nullptr;
  double chosen_best = 0.0;
  for (const auto& candidate : backups) {
    if (!state.has_miner(candidate.id)) continue;
    const MinerProfile& m = state.miner(candidate.id);
    if (!m.online || m.role == Role::Explorer) continue;
    const double b = state.miner_best(m.id);
    if (!chosen || b < chosen_best || (b == chosen_best && m.id < chosen->id)) {
      chosen = &m;
      chosen_best = b;
    }
  }
  if (!chosen) throw NoBackupAvailable("no online miner can take over from " + std::string(departed));

  const std::string id = chosen->id;
  Slot& s = state.slots[*slot];
  s.holder = id;
  s.last_holder = id;
  state.assignments.erase(std::string(departed));
  state.assignments[id] = *slot;
  state.miner(id).role = Role::Explorer;
  auto& series = state.per_miner_best[id];
  series.push_back(std::max(series.empty() ? 0.0 : series.back(), s.search.best_reward()));
  return id;
}

void depart(PoolState& state, std::string_view id) {
  MinerProfile& m = state.miner(id);
  m.online = false;
  for (auto& s : state.slots)
    if (s.holder && *s.holder == id) s.holder.reset();
}

void rejoin(PoolState& state, std::string_view id) {
  MinerProfile& m = state.miner(id);
  m.online = true;
  for (auto& s : state.slots) {
    if (!s.holder && s.last_holder == id) {
      s.holder = m.id;
      m.role = Role::Explorer;
      return;
    }
  }
  state.assignments.erase(m.id);
  if (m.role == Role::Explorer) m.role = m.strong() ? Role::Backup : Role::Exploiter;
}

void join(PoolState& state, MinerProfile profile) {
  profile.validate();
  if (state.has_miner(profile.id)) throw InvalidScenario("duplicate miner id " + profile.id);
  if (profile.role != Role::Backup) profile.role = profile.strong() ? Role::Backup : Role::Exploiter;
  profile.online = true;
  state.contribution[profile.id] = 0;
  state.per_miner_best[profile.id];
  state.miners.push_back(std::move(profile));
}

double RewardShare::total() const {
  double t = manager;
  for (const auto& [id, amount] : miners) t += amount;
  return t;
}

RewardShare distribute(const std::map<std::string, std::int64_t>& contribution, double block_reward,
                       double fee_rate) {
  if (!(fee_rate >= 0.0 && fee_rate < 1.0)) throw InvalidScenario("fee_rate must lie in [0, 1)");
  std::int64_t total = 0;
  for (const auto& [id, n] : contribution) total += std::max<std::int64_t>(0, n);
  if (total <= 0) throw NoContribution("no episodes were completed");

  RewardShare share;
  share.manager = fee_rate * block_reward;
  const double pot = block_reward - share.manager;
  for (const auto& [id, n] : contribution) {
    share.miners.emplace_back(id, pot * (static_cast<double>(std::max<std::int64_t>(0, n)) / static_cast<double>(total)));
  }
  return share;
}

int episode_quota(double strength, int episodes) {
  return static_cast<int>(std::floor(strength * episodes + 1e-9));
}

std::vector<int> completion_ticks(double strength, int episodes) {
  const int count = episode_quota(strength, episodes);
  std::vector<int> ticks;
  ticks.reserve(static_cast<std::size_t>(std::max(0, count)));
  for (int j = 1; j <= count; ++j) {
    ticks.push_back(static_cast<int>((static_cast<std::int64_t>(j) * episodes + count - 1) / count));
  }
  return ticks;
}

} // namespace ponas
