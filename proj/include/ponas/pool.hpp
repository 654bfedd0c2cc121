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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ponas/controller.hpp"
#include "ponas/random.hpp"
#include "ponas/space.hpp"

namespace ponas {

enum class Role { Explorer, Exploiter, Backup };

std::string_view to_string(Role r);

struct MinerProfile {
  std::string id;
  double strength = 1.0; // share of the strong-miner episode budget
  Role role = Role::Explorer;
  bool online = true;

  bool strong() const noexcept { return strength >= 1.0; }

  /// Throws InvalidScenario on an empty id or strength outside (0, 1].
  void validate() const;
};

/// How weak miners take part in a round.
enum class WeakPolicy {
  Collaborative, // weak miners exploit the pool's best
  Naive,         // weak miners get a subspace like everyone else
};

/// One partition cell and the search running in it. The holder changes on
/// backup promotion; the search itself moves with the cell.
struct Slot {
  Subspace subspace;
  MinerSearch search;
  std::optional<std::string> holder;
  std::string last_holder;
};

struct StdDevPoint {
  int episode = 0;
  double stddev = 0.0;
  int high_count = 0;
};

enum class AlertType { PrepareBackup, BackupPromoted, BackupUnavailable };

std::string_view to_string(AlertType t);

struct Alert {
  int episode = 0;
  AlertType type = AlertType::PrepareBackup;
  std::string miner;
};

struct AssignOptions {
  WeakPolicy policy = WeakPolicy::Collaborative;
  std::uint64_t search_seed = 0;
  double learning_rate = 0.1;
  double baseline_decay = 0.9;
};

/// The pool manager's view of one round.
struct PoolState {
  std::vector<MinerProfile> miners;
  std::vector<Slot> slots;
  std::map<std::string, std::size_t> assignments; // miner id -> slot

  std::optional<Configuration> best_config;
  double best_reward = 0.0;
  std::string best_miner;

  std::map<std::string, std::vector<double>> per_miner_best;
  std::map<std::string, std::int64_t> contribution;
  std::vector<StdDevPoint> stddev_series;

  // Set by monitor(); used to detect an upward crossing.
  std::optional<double> last_stddev;

  MinerProfile& miner(std::string_view id);
  const MinerProfile& miner(std::string_view id) const;
  bool has_miner(std::string_view id) const;

  /// Current best of `id`, 0 before its first episode.
  double miner_best(std::string_view id) const;

  /// Slot best as the monitor sees it: 0 while the slot has no holder.
  double live_value(std::size_t slot) const;
};

/**
 * Partitions `space` among the online strong miners (roster order) and makes
 * them Explorers; weak miners become Exploiters without a subspace. Miners
 * already marked Backup keep that role and get nothing.
 *
 * Under WeakPolicy::Naive weak miners are Explorers too: the partition has one
 * cell per strong and weak miner, strong miners first, so the strong cells are
 * the same as under the collaborative policy for the same `rng`.
 *
 * The search in slot j is seeded with derive_seed(options.search_seed, j).
 * Throws NoStrongMiners.
 */
PoolState assign(const SpacePtr& space, std::vector<MinerProfile> miners, Rng& rng, const AssignOptions& options = {});

/// Number of miners assign() gives a subspace to.
std::size_t explorer_count(const std::vector<MinerProfile>& miners, WeakPolicy policy);

/// As assign(), with the cells given instead of drawn. Needs one cell per Explorer.
PoolState assign_subspaces(std::vector<Subspace> cells, std::vector<MinerProfile> miners,
                           const AssignOptions& options = {});

/**
 * One weak-miner move: a single hyperparameter, picked uniformly among those
 * with more than one value, steps to an adjacent value of its full range. At a
 * boundary the only neighbour is taken. A value missing from the range steps to
 * the nearest range value on the chosen side. Returns `best` unchanged when no
 * hyperparameter can move.
 */
Configuration exploit_step(const Configuration& best, const SearchSpace& full_space, Rng& rng);

/// Applies one finished episode of `miner`. Returns true when best_global
/// improved, which is the cue to broadcast it. Equal rewards do not replace.
/// Throws UnknownMiner.
bool collect(PoolState& state, const EpisodeRecord& record, std::string_view miner);

struct MonitorOptions {
  double threshold = 0.05;
  int warmup = 500;
};

/**
 * High-reward slots are those whose best is at least the median of all slot
 * bests. Their dispersion is the population standard deviation of the live
 * values, so a slot that lost its holder counts as 0 until it is refilled.
 * The point is appended to stddev_series. From `warmup` on, PrepareBackup is
 * raised when the value exceeds the threshold and either was at or below it
 * at the previous call or jumped by more than the threshold since then; the
 * alert names the high slot with the lowest live value.
 *
 * Throws TooFewMiners when fewer than two slots are high.
 */
std::vector<Alert> monitor(PoolState& state, int episode, const MonitorOptions& options = {});

/**
 * Hands the slot of `departed` to the online candidate with the lowest current
 * best (ties by id). The candidate becomes an Explorer and continues the slot's
 * search, policy and best included. Returns the new holder.
 *
 * Throws UnknownMiner if `departed` never held a slot and NoBackupAvailable if
 * no candidate is online.
 */
std::string promote_backup(PoolState& state, std::string_view departed, const std::vector<MinerProfile>& backups);

/// Marks `id` offline and vacates its slot, if any. The slot keeps its search
/// and remembers the holder. Throws UnknownMiner.
void depart(PoolState& state, std::string_view id);

/// Brings `id` back online. A former holder retakes its slot if nobody
/// inherited it; otherwise strong miners wait as Backup and weak miners exploit.
/// Throws UnknownMiner.
void rejoin(PoolState& state, std::string_view id);

/// Adds a miner mid-round as Backup (strong) or Exploiter (weak).
/// Throws InvalidScenario on a duplicate id.
void join(PoolState& state, MinerProfile profile);

struct RewardShare {
  double manager = 0.0;
  std::vector<std::pair<std::string, double>> miners; // id order

  double total() const;
};

/// Fee to the manager, the rest proportional to completed episodes.
/// Throws NoContribution and InvalidScenario for fee_rate outside [0, 1).
RewardShare distribute(const std::map<std::string, std::int64_t>& contribution, double block_reward, double fee_rate);

inline RewardShare distribute(const PoolState& state, double block_reward, double fee_rate) {
  return distribute(state.contribution, block_reward, fee_rate);
}

/// Episodes a miner of `strength` completes out of `episodes`.
int episode_quota(double strength, int episodes);

/// Block-local ticks (1-based) at which those episodes complete, spread evenly.
std::vector<int> completion_ticks(double strength, int episodes);

} // namespace ponas
