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

#include "ponas/space.hpp"

namespace ponas {

struct HardwareConstraints {
  std::uint64_t lut_max = 100'000;
  double throughput_min = 10.0;

  /// Throws InvalidSpace unless both bounds are positive.
  void validate() const;
};

struct HardwareEstimate {
  std::uint64_t lut_count = 0;
  double throughput = 0.0;
  bool feasible = false;
};

/// Input image edge of the target dataset (32x32 CIFAR-10 images).
inline constexpr int kInputEdge = 32;
inline constexpr double kThroughputScale = 1e7;

/**
 * Analytic FPGA cost of a ten-field configuration
 * (kh, kw, nk, sh, sw, pool, ai, af, wi, wf):
 *
 *   lut_count  = kh * kw * nk * (wi + wf) * (ai + af)
 *   throughput = 1e7 / (ceil(32 / sh) * ceil(32 / sw) * kh * kw * nk * pool)
 *
 * A zero or negative stride, pool size, kernel dimension or kernel count, and
 * a zero total bit-width, yield lut_count = 0, throughput = 0, infeasible.
 * Throws ArityMismatch for any other arity.
 */
HardwareEstimate estimate(const Configuration& c, const HardwareConstraints& hc = {});

/// `raw_reward` if `c` is feasible under `hc`, otherwise 0.
double gate(const Configuration& c, const HardwareConstraints& hc, double raw_reward);

} // namespace ponas
