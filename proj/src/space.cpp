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

#include "ponas/space.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>

#include "ponas/error.hpp"

namespace ponas {

namespace {

bool strictly_increasing(const std::vector<int>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

} // namespace

HyperparameterSpec::HyperparameterSpec(std::string name, std::vector<int> range)
    : name_(std::move(name)), range_(std::move(range)) {
  if (range_.empty()) throw EmptyRange("hyperparameter '" + name_ + "' has an empty range");
  if (!strictly_increasing(range_))
    throw InvalidSpace("range of '" + name_ + "' must be strictly increasing");
}

SearchSpace::SearchSpace(std::vector<HyperparameterSpec> specs) : specs_(std::move(specs)) {
  if (specs_.empty()) throw InvalidSpace("search space needs at least one hyperparameter");
  std::set<std::string> names;
  for (const auto& s : specs_) {
    if (!names.insert(s.name()).second) throw InvalidSpace("duplicate hyperparameter '" + s.name() + "'");
  }
}

std::string to_string(const Configuration& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c.values[i]);
  }
  return out + ")";
}

Subspace::Subspace(SpacePtr parent, std::vector<std::vector<int>> ranges)
    : parent_(std::move(parent)), ranges_(std::move(ranges)) {
  if (!parent_) throw InvalidSpace("subspace without parent space");
  if (ranges_.size() != parent_->size())
    throw ArityMismatch("subspace has " + std::to_string(ranges_.size()) + " ranges, space has " +
                        std::to_string(parent_->size()));
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    if (ranges_[i].empty()) throw EmptyRange("subspace range " + std::to_string(i) + " is empty");
    if (!strictly_increasing(ranges_[i]))
      throw InvalidSpace("subspace range " + std::to_string(i) + " must be strictly increasing");
  }
}

Subspace Subspace::full(SpacePtr parent) {
  std::vector<std::vector<int>> ranges;
  for (const auto& s : parent->specs()) ranges.push_back(s.range());
  return Subspace(std::move(parent), std::move(ranges));
}

std::uint64_t Subspace::cardinality() const noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n = 1;
  for (const auto& r : ranges_) {
    if (n > kMax / r.size()) return kMax;
    n *= r.size();
  }
  return n;
}

bool Subspace::is_subset_of_parent() const {
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const auto& full = parent_->spec(i).range();
    if (!std::includes(full.begin(), full.end(), ranges_[i].begin(), ranges_[i].end())) return false;
  }
  return true;
}

int Subspace::index_of(std::size_t i, int value) const {
  const auto& r = ranges_.at(i);
  auto it = std::lower_bound(r.begin(), r.end(), value);
  if (it == r.end() || *it != value) return -1;
  return static_cast<int>(it - r.begin());
}

std::vector<std::vector<int>> enumerate_subsets(std::span<const int> range) {
  const std::size_t k = range.size();
  if (k == 0) throw EmptyRange("cannot enumerate subsets of an empty range");
  if (k > kMaxSubsetRange)
    throw RangeTooLarge("range of size " + std::to_string(k) + " exceeds " + std::to_string(kMaxSubsetRange));
  std::vector<std::vector<int>> out;
  out.reserve((std::size_t{1} << k) - 1);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << k); ++mask) {
    std::vector<int> subset;
    for (std::size_t b = 0; b < k; ++b) {
      if (mask & (std::uint32_t{1} << b)) subset.push_back(range[b]);
    }
    out.push_back(std::move(subset));
  }
  return out;
}

std::vector<Subspace> partition(const SpacePtr& space, std::size_t miners, Rng& rng) {
  if (!space) throw InvalidSpace("partition of a null space");
  if (miners == 0) throw InvalidSpace("partition needs at least one miner");
  std::vector<std::vector<std::vector<int>>> table;
  table.reserve(space->size());
  for (const auto& s : space->specs()) table.push_back(enumerate_subsets(s.range()));

  std::vector<Subspace> out;
  out.reserve(miners);
  for (std::size_t i = 0; i < miners; ++i) {
    std::vector<std::vector<int>> ranges;
    ranges.reserve(table.size());
    for (const auto& subsets : table) ranges.push_back(subsets[rng.below(subsets.size())]);
    out.emplace_back(space, std::move(ranges));
  }
  return out;
}

bool contains(const Subspace& sub, const Configuration& c) {
  if (c.size() != sub.size())
    throw ArityMismatch("configuration has " + std::to_string(c.size()) + " values, subspace has " +
                        std::to_string(sub.size()) + " ranges");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (sub.index_of(i, c[i]) < 0) return false;
  }
  return true;
}

namespace {

Fixture build_fixture() {
  using R = std::vector<int>;
  const R k5{1, 3, 5, 7, 9};
  const R nk7{4, 8, 12, 24, 36, 64, 128};
  const R s5{1, 2, 3, 4, 5};
  const R ai{0, 1, 2, 3};
  const R af{0, 1, 2, 3, 4, 5, 6};
  const R wi{0, 1, 2, 3, 4};

  auto full = std::make_shared<const SearchSpace>(std::vector<HyperparameterSpec>{
      {"kernel_height", k5},
      {"kernel_width", k5},
      {"num_kernels", nk7},
      {"stride_height", s5},
      {"stride_width", s5},
      {"pool_size", {1, 2}},
      {"act_num_int_bits", ai},
      {"act_num_frac_bits", af},
      {"weight_num_int_bits", wi},
      {"weight_num_frac_bits", af},
  });

  // Rows transcribed cell for cell, including values absent from the full
  // space row (48, 32) and the zero strides of S3.
  const std::vector<std::vector<R>> rows{
      {{1, 5, 7}, {3, 5, 7}, {24, 36, 48, 64}, {1, 2, 3}, {1, 2, 3}, {1, 2},
       {1, 2, 3}, {1, 2, 3, 4, 5}, {0, 1, 2, 3, 4}, {2, 3, 4, 5}},
      {{1, 3, 5, 7}, {1, 3, 5, 7}, {24, 36, 48, 64}, {1, 2, 3}, {1, 2, 3}, {1, 2},
       ai, af, {0, 1, 2, 3}, af},
      {k5, k5, nk7, {0, 1, 2, 3}, {0, 1, 2, 3}, {1}, ai, af, {0, 1, 2, 3}, af},
      {k5, k5, nk7, s5, s5, {1}, {2, 3}, {4, 5, 6}, {2, 3}, {4, 5, 6}},
      {k5, k5, nk7, s5, s5, {1}, {0, 1}, {1, 2, 3}, {0, 1}, {1, 2, 3}},
      {{1, 3, 5}, {1, 3, 5}, {4, 8, 12}, {1, 2, 3}, {1, 2, 3}, {1}, ai, af, {0, 1, 2, 3}, af},
      {{5, 7, 9}, {5, 7, 9}, {32, 64, 128}, {3, 4, 5}, {3, 4, 5}, {1}, ai, af, {0, 1, 2, 3}, af},
      {{5, 7, 9}, {5, 7, 9}, {32, 64, 128}, {3, 4, 5}, {3, 4, 5}, {1}, {2, 3}, {4, 5, 6}, {2, 3}, {4, 5, 6}},
      {{1, 3, 5}, {1, 3, 5}, {24, 36}, {1, 2, 3}, {1, 2, 3}, {1}, {2, 3}, {5, 6}, {2, 3}, {5, 6}},
  };

  Fixture f;
  f.full = full;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f.labels.push_back("S" + std::to_string(i + 1));
    f.subspaces.emplace_back(full, rows[i]);
  }
  return f;
}

} // namespace

const Fixture& load_fixture_subspaces() {
  static const Fixture fixture = build_fixture();
  return fixture;
}

SpacePtr fixture_space() { return load_fixture_subspaces().full; }

namespace {

std::string table_header(const SearchSpace& space) {
  std::string out = "# space_id";
  for (const auto& s : space.specs()) out += " | " + s.name();
  return out + "\n";
}

} // namespace

std::string format_table(std::span<const Subspace> rows, std::span<const std::string> labels) {
  if (rows.empty()) return {};
  if (labels.size() != rows.size()) throw InvalidSpace("one label per table row required");
  std::string out = table_header(rows.front().parent());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += labels[r];
    for (const auto& range : rows[r].ranges()) out += " | " + join(range);
    out += "\n";
  }
  return out;
}

std::string format_table(const SearchSpace& space, std::string_view label) {
  std::string out = table_header(space);
  out += label;
  for (const auto& s : space.specs()) out += " | " + join(s.range());
  return out + "\n";
}

std::vector<TableRow> parse_table(std::string_view text) {
  std::vector<TableRow> rows;
  std::size_t arity = 0;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line, '|');
    if (cells.size() < 2) throw InvalidSpace("table row without ranges: " + std::string(line));
    TableRow row;
    row.label = std::string(trim(cells[0]));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      std::vector<int> range;
      for (auto tok : split(cells[c], ',')) {
        tok = trim(tok);
        int v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
          throw InvalidSpace("bad table cell '" + std::string(cells[c]) + "'");
        range.push_back(v);
      }
      row.ranges.push_back(std::move(range));
    }
    if (arity == 0) arity = row.ranges.size();
    if (row.ranges.size() != arity) throw ArityMismatch("ragged table row '" + row.label + "'");
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace ponas
