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

#include "ponas/chain.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "ponas/error.hpp"

namespace ponas {

void Task::validate() const {
  if (id.empty()) throw InvalidScenario("task id must not be empty");
  for (unsigned char c : id) {
    if (std::isspace(c) || c == '=' || c == ',') throw InvalidScenario("task id '" + id + "' contains a separator");
  }
  if (!(difficulty > 0.0)) throw InvalidScenario("task " + id + ": difficulty must be positive");
  if (!(task_reward > 0.0)) throw InvalidScenario("task " + id + ": reward must be positive");
}

std::vector<Task> rank_tasks(std::vector<Task> tasks) {
  if (tasks.empty()) throw EmptyTaskList("no tasks to rank");
  std::stable_sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    const double ra = a.ranking_score();
    const double rb = b.ranking_score();
    if (ra != rb) return ra < rb;
    return a.id < b.id;
  });
  return tasks;
}

std::string_view to_string(Phase p) {
  switch (p) {
  case Phase::Init: return "init";
  case Phase::Training: return "training";
  case Phase::Validation: return "validation";
  }
  return "?";
}

Phase advance(Phase phase, PhaseEvent event) {
  if (phase == Phase::Init && event == PhaseEvent::TaskSelected) return Phase::Training;
  if (phase == Phase::Training && event == PhaseEvent::BudgetElapsed) return Phase::Validation;
  if (phase == Phase::Validation && event == PhaseEvent::RoundClosed) return Phase::Init;
  throw InvalidTransition("no transition from " + std::string(to_string(phase)));
}

std::string format_claim(double claimed) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", claimed);
  return buf;
}

namespace {

void frame_config(Hasher& h, const Configuration& c) {
  h.u32(static_cast<std::uint32_t>(c.size()));
  for (int v : c.values) h.i64(v);
}

} // namespace

Digest commitment_digest(const Configuration& c, double claimed, std::string_view miner) {
  Hasher h;
  frame_config(h, c);
  h.str(format_claim(claimed));
  h.str(miner);
  return h.finish();
}

CommitResult CommitmentSet::commit(Commitment c, Phase current) {
  c.phase_stamp = current;
  if (current != Phase::Training) return CommitResult::Rejected;
  auto key = std::make_pair(c.miner, c.digest);
  stored_.try_emplace(std::move(key), std::move(c));
  return CommitResult::Accepted;
}

const Commitment* CommitmentSet::find(std::string_view miner, const Digest& d) const {
  auto it = stored_.find(std::make_pair(std::string(miner), d));
  return it == stored_.end() ? nullptr : &it->second;
}

Digest Block::digest() const {
  Hasher h;
  h.u64(height);
  h.str(task);
  h.str(winner);
  frame_config(h, winning_config);
  h.digest(commitment);
  h.str(format_claim(validated_reward));
  h.digest(prev_digest);
  return h.finish();
}

RoundOutcome validate_round(std::span<const Submission> subs, const CommitmentSet& commitments,
                            const Evaluator& evaluator) {
  RoundOutcome out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto& s = subs[i];
    if (commitments.find(s.miner, commitment_digest(s.config, s.claimed, s.miner)))
      kept.push_back(i);
    else
      out.excluded.push_back(i);
  }
  std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
    if (subs[a].claimed != subs[b].claimed) return subs[a].claimed > subs[b].claimed;
    return subs[a].miner < subs[b].miner;
  });
  out.order = kept;

  for (std::size_t i : kept) {
    const auto& s = subs[i];
    ++out.evaluations;
    const double actual = evaluator(s.config);
    if (actual >= s.claimed) {
      Block b;
      b.winner = s.miner;
      b.winning_config = s.config;
      b.claimed = s.claimed;
      b.validated_reward = actual;
      b.commitment = commitment_digest(s.config, s.claimed, s.miner);
      out.block = std::move(b);
      break;
    }
  }
  return out;
}

Digest Chain::head_digest() const {
  if (blocks_.empty()) return Digest{};
  return blocks_.back().digest();
}

const Block& Chain::append(Block b) {
  b.height = height();
  b.prev_digest = head_digest();
  blocks_.push_back(std::move(b));
  return blocks_.back();
}

bool verify_linkage(std::span<const Block> blocks) {
  Digest prev{};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].height != i || blocks[i].prev_digest != prev) return false;
    prev = blocks[i].digest();
  }
  return true;
}

} // namespace ponas
