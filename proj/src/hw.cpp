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

#include "ponas/hw.hpp"

#include <string>

#include "ponas/error.hpp"

namespace ponas {

void HardwareConstraints::validate() const {
  if (lut_max == 0) throw InvalidSpace("lut_max must be positive");
  if (!(throughput_min > 0.0)) throw InvalidSpace("throughput_min must be positive");
}

HardwareEstimate estimate(const Configuration& c, const HardwareConstraints& hc) {
  if (c.size() != field::kCount)
    throw ArityMismatch("hardware model expects " + std::to_string(field::kCount) + " fields, got " +
                        std::to_string(c.size()));
  const std::int64_t kh = c[field::kKernelHeight];
  const std::int64_t kw = c[field::kKernelWidth];
  const std::int64_t nk = c[field::kNumKernels];
  const std::int64_t sh = c[field::kStrideHeight];
  const std::int64_t sw = c[field::kStrideWidth];
  const std::int64_t pool = c[field::kPoolSize];
  const std::int64_t act_bits = std::int64_t{c[field::kActIntBits]} + c[field::kActFracBits];
  const std::int64_t weight_bits = std::int64_t{c[field::kWeightIntBits]} + c[field::kWeightFracBits];

  if (kh <= 0 || kw <= 0 || nk <= 0 || sh <= 0 || sw <= 0 || pool <= 0 || act_bits <= 0 ||
      weight_bits <= 0 || c[field::kActIntBits] < 0 || c[field::kActFracBits] < 0 ||
      c[field::kWeightIntBits] < 0 || c[field::kWeightFracBits] < 0) {
    return {};
  }

  HardwareEstimate e;
  e.lut_count = static_cast<std::uint64_t>(kh * kw * nk * weight_bits * act_bits);
  const std::int64_t rows = (kInputEdge + sh - 1) / sh;
  const std::int64_t cols = (kInputEdge + sw - 1) / sw;
  const double work = static_cast<double>(rows * cols * kh * kw * nk * pool);
  e.throughput = kThroughputScale / work;
  e.feasible = e.lut_count <= hc.lut_max && e.throughput >= hc.throughput_min;
  return e;
}

double gate(const Configuration& c, const HardwareConstraints& hc, double raw_reward) {
  return estimate(c, hc).feasible ? raw_reward : 0.0;
}

} // namespace ponas
