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
#include <utility>
#include <vector>

#include "ponas/hw.hpp"
#include "ponas/space.hpp"

namespace ponas {

/// Epoch budget at which surrogate training saturates.
inline constexpr int kSaturationEpochs = 30;

struct LandscapeParams {
  std::uint64_t seed = 0;
  int optimum_count = 4;
  double noise_amplitude = 0.02;

  /// Throws InvalidSpace on optimum_count < 1 or noise outside [0, 0.1].
  void validate() const;
};

struct RewardSample {
  Configuration config;
  double reward = 0.0;
  int epochs_budget = kSaturationEpochs;
};

/// Seed-derived optimum of the surrogate landscape.
struct PlantedOptimum {
  Configuration center;
  double height = 0.0;
};

/**
 * Deterministic synthetic accuracy over the ten-field CNN space.
 *
 * raw(c)    = base(c) + sum_k height_k * exp(-d_k / 2) + noise_amplitude * h(c)
 * reward(c) = clamp(0.92 * tanh(3 * raw), 0, 1) * ramp(epochs)
 *
 * base(c) favours mid-sized kernels, more kernels, small strides and wide
 * bit-widths. d_k is the Euclidean distance from c to optimum k measured in
 * index steps of the full fixture ranges. h(c) is a seeded hash in [-1, 1).
 * Optimum 0 is the tallest and is feasible under the default constraints.
 * ramp() rises monotonically and equals 1 from 30 epochs on.
 */
class Landscape {
public:
  explicit Landscape(LandscapeParams params);

  double reward(const Configuration& c, int epochs = kSaturationEpochs) const;

  const LandscapeParams& params() const noexcept { return params_; }
  const std::vector<PlantedOptimum>& optima() const noexcept { return optima_; }

  /// Noise-free reward at optimum 0.
  double peak_value() const;

  /// The structural part, without optima or noise.
  static double base(const Configuration& c);

private:
  double noiseless(const Configuration& c) const;
  double roughness(const Configuration& c) const;

  LandscapeParams params_;
  std::vector<PlantedOptimum> optima_;
  std::vector<std::vector<double>> center_coords_;
};

/// One-shot form of Landscape::reward.
double surrogate_reward(const Configuration& c, const LandscapeParams& p, int epochs);

/// Anything that turns a configuration into a test accuracy in [0, 1].
class Trainer {
public:
  virtual ~Trainer() = default;
  virtual double train(const Configuration& c, int epochs) const = 0;
};

class SurrogateTrainer final : public Trainer {
public:
  explicit SurrogateTrainer(LandscapeParams p) : landscape_(p) {}
  double train(const Configuration& c, int epochs) const override { return landscape_.reward(c, epochs); }
  const Landscape& landscape() const noexcept { return landscape_; }

private:
  Landscape landscape_;
};

/// Hardware check first, training only for feasible configurations.
double gated_reward(const Trainer& trainer, const HardwareConstraints& hc, const Configuration& c,
                    int epochs = kSaturationEpochs);

inline constexpr std::uint64_t kMaxExhaustive = std::uint64_t{1} << 20;

/// Gated-reward argmax by full enumeration; ties go to the lexicographically
/// smallest configuration. Throws SpaceTooLarge above 2^20 configurations.
std::pair<Configuration, double> exhaustive_best(const Subspace& sub, const LandscapeParams& p,
                                                 const HardwareConstraints& hc,
                                                 int epochs = kSaturationEpochs);

} // namespace ponas
