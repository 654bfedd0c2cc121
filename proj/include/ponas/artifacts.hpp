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

#include <filesystem>
#include <string>

#include "ponas/sim.hpp"

namespace ponas {

/**
 * Fixed artifact files under one directory:
 *
 *   episodes.csv  round,episode,miner,slot,reward,best_so_far,slot_best
 *   stddev.csv    round,episode,stddev,high_count
 *   blocks.log    one key=value line per block, then "end blocks=N head=HEX"
 *   shares.csv    round,height,party,amount,fraction
 *   alerts.log    round,episode,type,miner
 *   phases.log    tick,round,phase
 *
 * Reals are printed with 17 significant digits so they read back exactly.
 */
void write_artifacts(const std::filesystem::path& dir, const RunArtifacts& artifacts);

struct ValidationReport {
  bool ok = true;
  std::string invariant; // first failing invariant
  std::string detail;
};

/**
 * Offline checks, in this order:
 *   monotonicity       best_so_far per (round, miner) and slot_best per
 *                      (round, slot) never decrease
 *   chain linkage      blocks.log parses, heights run 0.., prev digests and
 *                      header digests match, trailer agrees
 *   commitment audit   each winner's commitment digest recomputes, arrived by
 *                      the end of Training, and the claim validated
 *   share conservation shares of each block sum to its reward (1e-9 relative)
 *                      and every block has shares
 */
ValidationReport validate_artifacts(const std::filesystem::path& dir);

} // namespace ponas
