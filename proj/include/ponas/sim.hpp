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
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ponas/chain.hpp"
#include "ponas/controller.hpp"
#include "ponas/hw.hpp"
#include "ponas/pool.hpp"
#include "ponas/space.hpp"

namespace ponas {

enum class PartitionMode {
  Random,  // a fresh partition of the task space every round
  Full,    // every Explorer searches the whole space
  Fixture, // the published nine subspaces, cycled when searchers are not nine
};

std::string_view to_string(PartitionMode m);

struct SeedSet {
  std::uint64_t landscape = 0;
  std::uint64_t partition = 0;
  std::uint64_t search = 0;
  std::uint64_t exploit = 0;

  /// Four independent streams of `base`.
  static SeedSet from_base(std::uint64_t base);
};

/// Departure target resolved when the event fires: the holder of the slot
/// with the highest live best (lowest slot index on ties).
inline constexpr std::string_view kLeader = "@leader";

struct Departure {
  std::int64_t tick = 0;
  std::string miner;
};

struct Arrival {
  std::int64_t tick = 0;
  MinerProfile profile;
};

/**
 * Everything a run depends on.
 *
 * Time is counted in ticks, one episode per tick for a strong miner. Round r
 * starts at tick r * (episodes + 2): Init at offset 0, Training at offsets
 * 1..episodes, Validation at offset episodes + 1.
 */
struct Scenario {
  std::vector<MinerProfile> miners;
  std::vector<Departure> departures;
  std::vector<Arrival> joins;
  int latency = 1;
  SeedSet seeds;
  SearchBudget budget;
  int rounds = 1;
  HardwareConstraints constraints;
  double noise = 0.02;
  int optima = 4;
  double fee_rate = 0.0;
  MonitorOptions monitor;
  PartitionMode partition = PartitionMode::Random;
  WeakPolicy policy = WeakPolicy::Collaborative;
  std::vector<Task> tasks; // empty: one default task over `space`
  double learning_rate = 0.1;
  double baseline_decay = 0.9;
  std::string pool_id = "pool";
  SpacePtr space; // null: the fixture space

  std::int64_t ticks_per_round() const { return budget.episodes + 2; }
  std::int64_t horizon() const { return ticks_per_round() * rounds; }

  /// Throws InvalidScenario.
  void validate() const;
};

enum class EventKind { EpisodeDone, BestBroadcast, Commit, Submit, PhaseTick, MinerDeparture, MinerJoin };

std::string_view to_string(EventKind k);

struct EpisodeDone {
  std::string miner;
  int slot = -1; // -1 for an exploiting miner
  EpisodeRecord record;
};

struct BestBroadcast {
  std::string to;
  Configuration config;
};

struct CommitMsg {
  int round = 0;
  std::size_t candidate = 0;
  Configuration config;
  double claimed = 0.0;
  std::string finder;
};

struct SubmitMsg {
  int round = 0;
};

struct PhaseTickMsg {};

struct Event {
  std::int64_t time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::PhaseTick;
  std::variant<EpisodeDone, BestBroadcast, CommitMsg, SubmitMsg, PhaseTickMsg, Departure, Arrival> payload;
};

/// Min-queue on (time, seq); seq is assigned on push.
class EventQueue {
public:
  void push(std::int64_t time, EventKind kind, decltype(Event::payload) payload);
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }

private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct EpisodeRow {
  int round = 0;
  int episode = 0; // tick offset inside the round
  std::string miner;
  int slot = -1;
  double reward = 0.0;
  double best_so_far = 0.0; // the miner's own best this round
  std::optional<double> slot_best; // the slot's best, Explorers only
};

struct StdDevRow {
  int round = 0;
  StdDevPoint point;
};

struct AlertRow {
  int round = 0;
  Alert alert;
};

struct PhaseRow {
  std::int64_t tick = 0;
  int round = 0;
  Phase phase = Phase::Init;
};

struct BlockRecord {
  Block block;
  int round = 0;
  std::string finder;
  double block_reward = 0.0;
  std::int64_t commit_tick = 0;
  std::int64_t training_end = 0;
};

struct ShareRow {
  int round = 0;
  std::uint64_t height = 0;
  std::string party;
  double amount = 0.0;
  double fraction = 0.0;
};

struct RoundSummary {
  int round = 0;
  std::string task;
  double best_global = 0.0;
  std::string best_miner;
  std::optional<Configuration> best_config;
  int evaluations = 0;
  int late_commits = 0;
  std::optional<std::uint64_t> height; // set when a block was produced
};

struct RunArtifacts {
  std::vector<EpisodeRow> episodes;
  std::vector<StdDevRow> stddev;
  std::vector<AlertRow> alerts;
  std::vector<PhaseRow> phases;
  std::vector<BlockRecord> blocks;
  std::vector<ShareRow> shares;
  std::vector<RoundSummary> rounds;

  /// Running max over all miners of the given round, indexed by episode - 1.
  std::vector<double> best_curve(int round) const;
};

/// Deterministic discrete-event run of one pool against one full node.
class Simulator {
public:
  /// `workers` > 1 computes the episodes of a tick on that many threads.
  explicit Simulator(Scenario scenario, int workers = 1);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Throws InvalidScenario if `tick` is outside the horizon.
  void inject_departure(std::int64_t tick, std::string miner);
  void inject_join(std::int64_t tick, MinerProfile profile);

  RunArtifacts run();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunArtifacts run(const Scenario& scenario, int workers = 1);

} // namespace ponas
