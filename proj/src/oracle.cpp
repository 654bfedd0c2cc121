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

#include "ponas/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ponas/error.hpp"
#include "ponas/random.hpp"

namespace ponas {

namespace {

constexpr double kPrimaryHeight = 0.30;
constexpr double kBumpWidth = 2.0;
constexpr double kBaseFloor = 0.05;
constexpr double kBaseSpan = 0.65;
constexpr double kBaseSharpness = 3.0;
constexpr double kMinSeparationSq = 9.0;
constexpr double kRampTau = 6.0;
constexpr double kCeiling = 0.92;
constexpr double kGain = 3.0;
constexpr int kMaxPlantingDraws = 1 << 16;
constexpr int kPrimaryCandidates = 64;
constexpr double kSecondaryHeight = 0.10;
constexpr double kSecondarySpread = 0.10;

// Fractional position of `v` inside the sorted range, extrapolated past the ends.
double index_coord(const std::vector<int>& range, int v) {
  if (range.size() == 1) return static_cast<double>(v - range.front());
  if (v <= range.front()) {
    return static_cast<double>(v - range[0]) / (range[1] - range[0]);
  }
  if (v >= range.back()) {
    const std::size_t n = range.size();
    return static_cast<double>(n - 1) + static_cast<double>(v - range[n - 1]) / (range[n - 1] - range[n - 2]);
  }
  auto hi = std::upper_bound(range.begin(), range.end(), v);
  auto lo = hi - 1;
  return static_cast<double>(lo - range.begin()) + static_cast<double>(v - *lo) / (*hi - *lo);
}

std::vector<double> coords_of(const Configuration& c) {
  const auto& space = *fixture_space();
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = index_coord(space.spec(i).range(), c[i]);
  return out;
}

double dist_sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

Configuration draw_config(Rng& rng) {
  const auto& space = *fixture_space();
  Configuration c;
  for (const auto& s : space.specs()) c.values.push_back(s.range()[rng.below(s.range().size())]);
  return c;
}

double kernel_pref(int k) {
  const double x = (k - 5.0) / 5.0;
  return std::exp(-x * x * x * x);
}

double channel_pref(int n) { return 1.0 - std::exp(-std::max(1, n) / 16.0); }

double stride_pref(int s) {
  const double x = (std::max(1, s) - 1.0) / 4.0;
  return std::exp(-x * x);
}

double bits_pref(int int_bits, int frac_bits) {
  const int total = std::max(0, int_bits) + std::max(0, frac_bits);
  return 1.0 - std::exp(-total / 2.0);
}

double ramp(int epochs) {
  const int e = std::clamp(epochs, 0, kSaturationEpochs);
  return (1.0 - std::exp(-e / kRampTau)) / (1.0 - std::exp(-kSaturationEpochs / kRampTau));
}

// Accuracy-like diminishing returns; strictly increasing, so argmaxes are kept.
double saturate(double raw) {
  return std::clamp(kCeiling * std::tanh(kGain * std::max(0.0, raw)), 0.0, 1.0);
}

void check_arity(const Configuration& c) {
  if (c.size() != field::kCount)
    throw ArityMismatch("surrogate landscape expects " + std::to_string(field::kCount) + " fields, got " +
                        std::to_string(c.size()));
}

} // namespace

void LandscapeParams::validate() const {
  if (optimum_count < 1) throw InvalidSpace("optimum_count must be at least 1");
  if (!(noise_amplitude >= 0.0 && noise_amplitude <= 0.1))
    throw InvalidSpace("noise_amplitude must lie in [0, 0.1]");
}

Landscape::Landscape(LandscapeParams params) : params_(params) {
  params_.validate();
  Rng rng(derive_seed(params_.seed, 0x706c616e74ULL));
  const HardwareConstraints defaults;

  // Primary optimum: the highest-base feasible configuration among a fixed
  // number of draws.
  PlantedOptimum primary{draw_config(rng), kPrimaryHeight};
  bool found = false;
  double best_base = 0.0;
  for (int i = 0; i < kMaxPlantingDraws && !(found && i >= kPrimaryCandidates); ++i) {
    Configuration c = draw_config(rng);
    if (!estimate(c, defaults).feasible) continue;
    const double b = base(c);
    if (!found || b > best_base) {
      found = true;
      best_base = b;
      primary.center = std::move(c);
    }
  }
  optima_.push_back(primary);
  center_coords_.push_back(coords_of(primary.center));

  for (int k = 1; k < params_.optimum_count; ++k) {
    Configuration c = draw_config(rng);
    for (int i = 0; i < kMaxPlantingDraws && dist_sq(coords_of(c), center_coords_[0]) < kMinSeparationSq; ++i) {
      c = draw_config(rng);
    }
    const double height = kSecondaryHeight + kSecondarySpread * rng.uniform();
    optima_.push_back({c, height});
    center_coords_.push_back(coords_of(c));
  }
}

double Landscape::base(const Configuration& c) {
  check_arity(c);
  // Weighted geometric mean of per-feature preferences in (0, 1].
  const double act = bits_pref(c[field::kActIntBits], c[field::kActFracBits]);
  const double weight = bits_pref(c[field::kWeightIntBits], c[field::kWeightFracBits]);
  if (act <= 0.0 || weight <= 0.0) return kBaseFloor;
  const double pool = 1.0 - 0.1 * std::max(0, c[field::kPoolSize] - 1);
  const double log_score = 0.15 * std::log(kernel_pref(c[field::kKernelHeight])) +
                           0.15 * std::log(kernel_pref(c[field::kKernelWidth])) +
                           0.20 * std::log(channel_pref(c[field::kNumKernels])) +
                           0.10 * std::log(stride_pref(c[field::kStrideHeight])) +
                           0.10 * std::log(stride_pref(c[field::kStrideWidth])) + 0.05 * std::log(pool) +
                           0.125 * std::log(act) + 0.125 * std::log(weight);
  return kBaseFloor + kBaseSpan * std::exp(kBaseSharpness * log_score);
}

double Landscape::noiseless(const Configuration& c) const {
  double r = base(c);
  const auto coords = coords_of(c);
  for (std::size_t k = 0; k < optima_.size(); ++k) {
    r += optima_[k].height * std::exp(-std::sqrt(dist_sq(coords, center_coords_[k])) / kBumpWidth);
  }
  return r;
}

double Landscape::reward(const Configuration& c, int epochs) const {
  double r = noiseless(c);
  if (params_.noise_amplitude > 0.0) r += params_.noise_amplitude * roughness(c);
  return saturate(r) * ramp(epochs);
}

double Landscape::roughness(const Configuration& c) const {
  // Independent hashed value per configuration, uniform in [-1, 1).
  std::uint64_t h = mix64(params_.seed ^ 0x6e6f697365ULL);
  for (std::size_t i = 0; i < c.size(); ++i) {
    h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c[i])) + (std::uint64_t{i} << 32)));
  }
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

double Landscape::peak_value() const { return saturate(noiseless(optima_.front().center)); }

double surrogate_reward(const Configuration& c, const LandscapeParams& p, int epochs) {
  return Landscape(p).reward(c, epochs);
}

double gated_reward(const Trainer& trainer, const HardwareConstraints& hc, const Configuration& c, int epochs) {
  if (!estimate(c, hc).feasible) return 0.0;
  return trainer.train(c, epochs);
}

std::pair<Configuration, double> exhaustive_best(const Subspace& sub, const LandscapeParams& p,
                                                 const HardwareConstraints& hc, int epochs) {
  if (sub.cardinality() > kMaxExhaustive)
    throw SpaceTooLarge("subspace of " + std::to_string(sub.cardinality()) + " configurations exceeds 2^20");
  const SurrogateTrainer trainer(p);
  std::vector<std::size_t> idx(sub.size(), 0);
  Configuration c;
  for (const auto& r : sub.ranges()) c.values.push_back(r.front());

  Configuration best = c;
  double best_reward = gated_reward(trainer, hc, c, epochs);
  for (;;) {
    // Odometer with the last hyperparameter fastest: lexicographic order.
    std::size_t pos = sub.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < sub.range(pos).size()) {
        c.values[pos] = sub.range(pos)[idx[pos]];
        break;
      }
      idx[pos] = 0;
      c.values[pos] = sub.range(pos).front();
      if (pos == 0) return {best, best_reward};
    }
    const double r = gated_reward(trainer, hc, c, epochs);
    if (r > best_reward) {
      best_reward = r;
      best = c;
    }
  }
}

} // namespace ponas
