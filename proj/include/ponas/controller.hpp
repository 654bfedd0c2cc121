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

#include <memory>
#include <optional>
#include <vector>

#include "ponas/hw.hpp"
#include "ponas/oracle.hpp"
#include "ponas/random.hpp"
#include "ponas/space.hpp"

namespace ponas {

struct SearchBudget {
  int episodes = 2000;
  int epochs_per_episode = kSaturationEpochs;

  void validate() const;
};

struct EpisodeRecord {
  int episode = 0;
  Configuration config;
  double reward = 0.0; // post-gate
  double best_so_far = 0.0;
};

/// Independent categorical distribution per hyperparameter, parameterised by logits.
struct Policy {
  std::vector<std::vector<double>> logits;
  double learning_rate = 0.1;
  double baseline = 0.0;
  double baseline_decay = 0.9;

  /// Zero logits (uniform) shaped after `sub`.
  static Policy uniform(const Subspace& sub, double learning_rate = 0.1, double baseline_decay = 0.9);

  /// softmax(logits[i]).
  std::vector<double> probabilities(std::size_t i) const;
};

/// Draws every hyperparameter independently from its softmax.
Configuration sample(const Policy& policy, const Subspace& sub, Rng& rng);

/// One REINFORCE step with the moving-average baseline:
///   logits[i] += lr * (reward - baseline) * (onehot(chosen_i) - softmax(logits[i]))
///   baseline  <- decay * baseline + (1 - decay) * reward
/// `c` must lie in `sub`.
Policy update(Policy policy, const Subspace& sub, const Configuration& c, double reward);

/// Seam for alternative search strategies (an RNN controller, for instance).
class SearchController {
public:
  virtual ~SearchController() = default;
  virtual Configuration propose(Rng& rng) = 0;
  virtual void learn(const Configuration& c, double reward) = 0;
  virtual std::unique_ptr<SearchController> clone() const = 0;
};

class CategoricalController final : public SearchController {
public:
  CategoricalController(Subspace sub, Policy policy) : sub_(std::move(sub)), policy_(std::move(policy)) {}

  Configuration propose(Rng& rng) override { return sample(policy_, sub_, rng); }
  void learn(const Configuration& c, double reward) override { policy_ = update(std::move(policy_), sub_, c, reward); }
  std::unique_ptr<SearchController> clone() const override { return std::make_unique<CategoricalController>(*this); }

  const Policy& policy() const noexcept { return policy_; }
  const Subspace& subspace() const noexcept { return sub_; }

private:
  Subspace sub_;
  Policy policy_;
};

/**
 * Everything a miner needs to continue searching one subspace: controller,
 * random stream and best-so-far. Moving it to another miner hands over the
 * search mid-flight.
 */
class MinerSearch {
public:
  MinerSearch(Subspace sub, std::uint64_t seed, double learning_rate = 0.1, double baseline_decay = 0.9);

  MinerSearch(const MinerSearch& other);
  MinerSearch& operator=(const MinerSearch& other);
  MinerSearch(MinerSearch&&) noexcept = default;
  MinerSearch& operator=(MinerSearch&&) noexcept = default;

  /// sample -> gate -> reward -> learn -> record.
  EpisodeRecord step(const Trainer& trainer, const HardwareConstraints& hc, int epochs);

  const Subspace& subspace() const noexcept { return sub_; }
  int episodes_done() const noexcept { return episodes_; }
  double best_reward() const noexcept { return best_reward_; }
  const std::optional<Configuration>& best_config() const noexcept { return best_config_; }
  const SearchController& controller() const noexcept { return *controller_; }

private:
  Subspace sub_;
  std::unique_ptr<SearchController> controller_;
  Rng rng_;
  int episodes_ = 0;
  double best_reward_ = 0.0;
  std::optional<Configuration> best_config_;
};

/// A full per-miner search: exactly budget.episodes records.
std::vector<EpisodeRecord> run_search(const Subspace& sub, const SearchBudget& budget, const HardwareConstraints& hc,
                                      const LandscapeParams& p, Rng& rng);

} // namespace ponas
