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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ponas/digest.hpp"
#include "ponas/hw.hpp"
#include "ponas/space.hpp"

namespace ponas {

struct Task {
  std::string id;
  double difficulty = 1.0;
  double task_reward = 1.0;
  SpacePtr space;
  HardwareConstraints constraints;

  double ranking_score() const { return difficulty / task_reward; }

  /// Throws InvalidScenario unless difficulty and reward are positive.
  void validate() const;
};

/// Ascending ranking score, ties by id. Throws EmptyTaskList.
std::vector<Task> rank_tasks(std::vector<Task> tasks);

enum class Phase { Init, Training, Validation };

std::string_view to_string(Phase p);

enum class PhaseEvent { TaskSelected, BudgetElapsed, RoundClosed };

/// Init -TaskSelected-> Training -BudgetElapsed-> Validation -RoundClosed-> Init.
/// Throws InvalidTransition for any other pair.
Phase advance(Phase phase, PhaseEvent event);

/**
 * Canonical commitment digest: SHA-256 over
 *   u32 arity, then each value as i64            (big-endian)
 *   u32 length + bytes of the claim printed "%.6f"
 *   u32 length + bytes of the miner id
 */
Digest commitment_digest(const Configuration& c, double claimed, std::string_view miner);

/// The claim as it enters the digest.
std::string format_claim(double claimed);

struct Commitment {
  Digest digest{};
  std::string miner;
  Phase phase_stamp = Phase::Init; // set by the receiving node
  std::int64_t tick = 0;
};

struct Submission {
  Configuration config;
  double claimed = 0.0;
  std::string miner;
};

enum class CommitResult { Accepted, Rejected };

/// Commitments accepted in the current round, one per (miner, digest).
class CommitmentSet {
public:
  /// Stamps `c` with `current` and stores it iff `current` is Training.
  /// A repeated (miner, digest) is accepted without a second copy.
  CommitResult commit(Commitment c, Phase current);

  const Commitment* find(std::string_view miner, const Digest& d) const;
  std::size_t size() const noexcept { return stored_.size(); }
  void clear() { stored_.clear(); }

private:
  std::map<std::pair<std::string, Digest>, Commitment> stored_;
};

struct Block {
  std::uint64_t height = 0;
  std::string task;
  std::string winner;
  Configuration winning_config;
  double claimed = 0.0;
  double validated_reward = 0.0;
  Digest commitment{};
  Digest prev_digest{};

  /**
   * Header digest: SHA-256 over u64 height, task, winner (length-prefixed),
   * the winning configuration framed as in commitment_digest, the commitment
   * digest, the validated reward printed "%.6f" (length-prefixed) and
   * prev_digest.
   */
  Digest digest() const;
};

using Evaluator = std::function<double(const Configuration&)>;

struct RoundOutcome {
  std::optional<Block> block;
  int evaluations = 0;
  std::vector<std::size_t> excluded; // submissions without a matching commitment
  std::vector<std::size_t> order;    // evaluation order over the input indices
};

/**
 * Drops submissions without a commitment matching their digest, sorts the rest
 * by claim descending (ties by miner id), and evaluates them in that order. The
 * first whose re-evaluated reward is at least its claim wins. The returned
 * block has height, task and prev_digest left for the caller to fill.
 */
RoundOutcome validate_round(std::span<const Submission> subs, const CommitmentSet& commitments,
                            const Evaluator& evaluator);

/// Append-only linked block list.
class Chain {
public:
  std::uint64_t height() const noexcept { return blocks_.size(); }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  /// Digest the next block must point at; all zero before the first block.
  Digest head_digest() const;

  /// Sets height and prev_digest, then appends.
  const Block& append(Block b);

private:
  std::vector<Block> blocks_;
};

/// True iff heights run 0, 1, ... and every prev_digest matches its predecessor.
bool verify_linkage(std::span<const Block> blocks);

} // namespace ponas
