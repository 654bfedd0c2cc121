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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ponas/sim.hpp"
#include "ponas/space.hpp"

namespace ponas {

/**
 * Experiment configuration, a JSON object. Every key is optional.
 *
 *   miners            count, or list of ids, or list of {id, strength, role}
 *   strengths         list parallel to a miners list or count
 *   backups           ids whose role is backup
 *   seeds             {landscape, partition, search, exploit}; a missing entry
 *                     is derived from the --seed value
 *   episodes, epochs  episode budget per round and epochs per episode
 *   blocks            number of block rounds
 *   latency_ticks     delay of broadcasts and commitments
 *   departures        [{tick, miner}]; miner may be "@leader"
 *   joins             [{tick, id, strength}]
 *   lut_max, throughput_min
 *   noise, optima     surrogate landscape
 *   fee_rate
 *   monitor_threshold, monitor_warmup
 *   partition         "random" | "full" | "fixture"
 *   policy            "collaborative" | "naive"
 *   tasks             [{id, difficulty, reward}]
 *   learning_rate, baseline_decay
 *   pool_id
 *   space             "fixture", or [{name, range}]
 *
 * Unknown keys and ill-typed values raise ConfigError.
 */
Scenario parse_scenario(std::string_view json_text, std::uint64_t seed);

Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed);

/// Only the `space` key of a configuration; other keys are checked but ignored.
SpacePtr parse_space(std::string_view json_text);

SpacePtr load_space(const std::filesystem::path& path);

/// Whole file as a string. Throws ConfigError when unreadable.
std::string read_text(const std::filesystem::path& path);

} // namespace ponas
