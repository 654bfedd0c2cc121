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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ponas/random.hpp"

namespace ponas {

/// Positions of the ten hyperparameters of the CNN search space.
namespace field {
inline constexpr std::size_t kKernelHeight = 0;
inline constexpr std::size_t kKernelWidth = 1;
inline constexpr std::size_t kNumKernels = 2;
inline constexpr std::size_t kStrideHeight = 3;
inline constexpr std::size_t kStrideWidth = 4;
inline constexpr std::size_t kPoolSize = 5;
inline constexpr std::size_t kActIntBits = 6;
inline constexpr std::size_t kActFracBits = 7;
inline constexpr std::size_t kWeightIntBits = 8;
inline constexpr std::size_t kWeightFracBits = 9;
inline constexpr std::size_t kCount = 10;
} // namespace field

/// Largest searching range accepted by enumerate_subsets (2^12 - 1 subsets).
inline constexpr std::size_t kMaxSubsetRange = 12;

/// A named hyperparameter with its discrete searching range.
class HyperparameterSpec {
public:
  /// Throws EmptyRange, or InvalidSpace when the range is not strictly increasing.
  HyperparameterSpec(std::string name, std::vector<int> range);

  const std::string& name() const noexcept { return name_; }
  const std::vector<int>& range() const noexcept { return range_; }

private:
  std::string name_;
  std::vector<int> range_;
};

/// Ordered list of hyperparameters. Immutable.
class SearchSpace {
public:
  explicit SearchSpace(std::vector<HyperparameterSpec> specs);

  std::size_t size() const noexcept { return specs_.size(); }
  const HyperparameterSpec& spec(std::size_t i) const { return specs_.at(i); }
  const std::vector<HyperparameterSpec>& specs() const noexcept { return specs_; }

private:
  std::vector<HyperparameterSpec> specs_;
};

using SpacePtr = std::shared_ptr<const SearchSpace>;

/// One concrete value per hyperparameter.
struct Configuration {
  std::vector<int> values;

  std::size_t size() const noexcept { return values.size(); }
  int operator[](std::size_t i) const { return values[i]; }

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

std::string to_string(const Configuration& c);

/**
 * One searching range per hyperparameter of a parent space.
 *
 * Ranges are non-empty and strictly increasing. They are subsets of the
 * parent ranges when produced by partition(); published fixtures may carry
 * values outside the parent row, see is_subset_of_parent().
 */
class Subspace {
public:
  Subspace(SpacePtr parent, std::vector<std::vector<int>> ranges);

  /// The parent space itself, unpartitioned.
  static Subspace full(SpacePtr parent);

  const SearchSpace& parent() const noexcept { return *parent_; }
  const SpacePtr& parent_ptr() const noexcept { return parent_; }
  std::size_t size() const noexcept { return ranges_.size(); }
  const std::vector<int>& range(std::size_t i) const { return ranges_.at(i); }
  const std::vector<std::vector<int>>& ranges() const noexcept { return ranges_; }

  /// Number of configurations, saturating at UINT64_MAX.
  std::uint64_t cardinality() const noexcept;

  bool is_subset_of_parent() const;

  /// Index of `value` in range(i), or -1.
  int index_of(std::size_t i, int value) const;

  friend bool operator==(const Subspace& a, const Subspace& b) { return a.ranges_ == b.ranges_; }

private:
  SpacePtr parent_;
  std::vector<std::vector<int>> ranges_;
};

/// All 2^k - 1 non-empty, order-preserving subsets of `range`, by ascending bitmask.
std::vector<std::vector<int>> enumerate_subsets(std::span<const int> range);

/// Splits `space` into `miners` (possibly overlapping) subspaces.
///
/// For every miner and every hyperparameter j, in that order, one entry of the
/// subset table of range j is drawn uniformly from `rng`.
std::vector<Subspace> partition(const SpacePtr& space, std::size_t miners, Rng& rng);

/// True iff every value of `c` lies in the matching range. Throws ArityMismatch.
bool contains(const Subspace& sub, const Configuration& c);

/// The published nine-subspace assignment and the full space it was drawn from.
struct Fixture {
  static constexpr int kVersion = 1;
  SpacePtr full;
  std::vector<std::string> labels; // "S1" .. "S9"
  std::vector<Subspace> subspaces;
};

const Fixture& load_fixture_subspaces();

/// Shorthand for load_fixture_subspaces().full.
SpacePtr fixture_space();

// Plain-text table: a '#' header naming the hyperparameters, then one row per
// space: `label | v, v, v | v, v | ...`.
std::string format_table(std::span<const Subspace> rows, std::span<const std::string> labels);
std::string format_table(const SearchSpace& space, std::string_view label);

struct TableRow {
  std::string label;
  std::vector<std::vector<int>> ranges;
};

/// Parses format_table output. Throws InvalidSpace on malformed input.
std::vector<TableRow> parse_table(std::string_view text);

} // namespace ponas
