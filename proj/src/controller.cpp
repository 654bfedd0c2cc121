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

#include "ponas/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ponas/error.hpp"

namespace ponas {

void SearchBudget::validate() const {
  if (episodes < 1) throw InvalidSpace("episode budget must be at least 1");
  if (epochs_per_episode < 1) throw InvalidSpace("epochs per episode must be at least 1");
}

Policy Policy::uniform(const Subspace& sub, double learning_rate, double baseline_decay) {
  Policy p;
  for (const auto& r : sub.ranges()) p.logits.emplace_back(r.size(), 0.0);
  p.learning_rate = learning_rate;
  p.baseline_decay = baseline_decay;
  return p;
}

std::vector<double> Policy::probabilities(std::size_t i) const {
  const auto& z = logits.at(i);
  const double top = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    p[k] = std::exp(z[k] - top);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

namespace {

void check_shape(const Policy& policy, const Subspace& sub) {
  if (policy.logits.size() != sub.size())
    throw ArityMismatch("policy has " + std::to_string(policy.logits.size()) + " heads, subspace has " +
                        std::to_string(sub.size()));
  for (std::size_t i = 0; i < sub.size(); ++i) {
    if (policy.logits[i].size() != sub.range(i).size())
      throw ArityMismatch("policy head " + std::to_string(i) + " does not match its range");
  }
}

} // namespace

Configuration sample(const Policy& policy, const Subspace& sub, Rng& rng) {
  check_shape(policy, sub);
  Configuration c;
  c.values.reserve(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const auto& range = sub.range(i);
    if (range.size() == 1) {
      c.values.push_back(range.front());
      continue;
    }
    const auto p = policy.probabilities(i);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = p.size() - 1;
    for (std::size_t k = 0; k < p.size(); ++k) {
      acc += p[k];
      if (u < acc) {
        pick = k;
        break;
      }
    }
    c.values.push_back(range[pick]);
  }
  return c;
}

Policy update(Policy policy, const Subspace& sub, const Configuration& c, double reward) {
  check_shape(policy, sub);
  if (c.size() != sub.size()) throw ArityMismatch("configuration arity does not match the subspace");
  const double advantage = reward - policy.baseline;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const int chosen = sub.index_of(i, c[i]);
    if (chosen < 0) throw InvalidSpace("configuration value outside the subspace at position " + std::to_string(i));
    const auto p = policy.probabilities(i);
    auto& z = policy.logits[i];
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double grad = (static_cast<int>(k) == chosen ? 1.0 : 0.0) - p[k];
      z[k] += policy.learning_rate * advantage * grad;
    }
  }
  policy.baseline = policy.baseline_decay * policy.baseline + (1.0 - policy.baseline_decay) * reward;
  return policy;
}

MinerSearch::MinerSearch(Subspace sub, std::uint64_t seed, double learning_rate, double baseline_decay)
    : sub_(sub),
      controller_(std::make_unique<CategoricalController>(sub, Policy::uniform(sub, learning_rate, baseline_decay))),
      rng_(seed) {}

MinerSearch::MinerSearch(const MinerSearch& other)
    : sub_(other.sub_),
      controller_(other.controller_->clone()),
      rng_(other.rng_),
      episodes_(other.episodes_),
      best_reward_(other.best_reward_),
      best_config_(other.best_config_) {}

MinerSearch& MinerSearch::operator=(const MinerSearch& other) {
  if (this != &other) *this = MinerSearch(other);
  return *this;
}

EpisodeRecord MinerSearch::step(const Trainer& trainer, const HardwareConstraints& hc, int epochs) {
  const Configuration c = controller_->propose(rng_);
  const double reward = gated_reward(trainer, hc, c, epochs);
  // Infeasible episodes still teach the controller, with reward 0.
  controller_->learn(c, reward);
  ++episodes_;
  if (!best_config_ || reward > best_reward_) {
    best_reward_ = reward;
    best_config_ = c;
  }
  return {episodes_, c, reward, best_reward_};
}

std::vector<EpisodeRecord> run_search(const Subspace& sub, const SearchBudget& budget, const HardwareConstraints& hc,
                                      const LandscapeParams& p, Rng& rng) {
  budget.validate();
  const SurrogateTrainer trainer(p);
  MinerSearch search(sub, rng.next());
  std::vector<EpisodeRecord> out;
  out.reserve(static_cast<std::size_t>(budget.episodes));
  for (int e = 0; e < budget.episodes; ++e) out.push_back(search.step(trainer, hc, budget.epochs_per_episode));
  return out;
}

} // namespace ponas
