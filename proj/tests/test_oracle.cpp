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

#include <doctest.h>

#include <cmath>
#include <optional>

#include "ponas/error.hpp"
#include "ponas/oracle.hpp"

using namespace ponas;

namespace {

// Independent brute force: odometer with the first field fastest, argmax with
// lexicographic tie-break made explicit.
std::pair<Configuration, double> brute(const Subspace& sub, const LandscapeParams& p, const HardwareConstraints& hc) {
  const Landscape land(p);
  std::vector<std::size_t> idx(sub.size(), 0);
  std::optional<Configuration> best;
  double best_r = 0.0;
  for (;;) {
    Configuration c;
    for (std::size_t i = 0; i < sub.size(); ++i) c.values.push_back(sub.range(i)[idx[i]]);
    const double r = estimate(c, hc).feasible ? land.reward(c) : 0.0;
    if (!best || r > best_r || (r == best_r && c < *best)) {
      best = c;
      best_r = r;
    }
    std::size_t i = 0;
    while (i < sub.size() && ++idx[i] == sub.range(i).size()) idx[i++] = 0;
    if (i == sub.size()) return {*best, best_r};
  }
}

Configuration mid() { return Configuration{{3, 3, 24, 1, 1, 1, 2, 5, 2, 5}}; }

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("rewards are deterministic and bounded") {
  const Landscape a({7, 4, 0.02}), b({7, 4, 0.02}), other({8, 4, 0.02});
  const auto& fx = load_fixture_subspaces();
  Rng rng(1);
  int differ = 0;
  for (int t = 0; t < 500; ++t) {
    Configuration c;
    for (const auto& s : fx.full->specs()) c.values.push_back(s.range()[rng.below(s.range().size())]);
    const double r = a.reward(c);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    CHECK(r == b.reward(c));
    if (r != other.reward(c)) ++differ;
  }
  CHECK(differ > 400);
}

TEST_CASE("training budget ramps up and saturates") {
  const Landscape land({3, 4, 0.0});
  const Configuration c = mid();
  CHECK(land.reward(c, 0) == 0.0);
  CHECK(land.reward(c, 1) < land.reward(c, 10));
  CHECK(land.reward(c, 10) < land.reward(c, kSaturationEpochs));
  CHECK(land.reward(c, kSaturationEpochs) == land.reward(c, 3 * kSaturationEpochs));
}

TEST_CASE("noise is bounded by its amplitude") {
  const Landscape clean({5, 4, 0.0}), noisy({5, 4, 0.02});
  Rng rng(2);
  const auto space = fixture_space();
  for (int t = 0; t < 300; ++t) {
    Configuration c;
    for (const auto& s : space->specs()) c.values.push_back(s.range()[rng.below(s.range().size())]);
    // saturate() has slope at most 0.92 * 3
    CHECK(std::abs(noisy.reward(c) - clean.reward(c)) <= 0.92 * 3 * 0.02 + 1e-12);
  }
}

TEST_CASE("planted optima") {
  const Landscape land({11, 5, 0.0});
  REQUIRE(land.optima().size() == 5);
  const auto& top = land.optima()[0];
  CHECK(estimate(top.center).feasible);
  CHECK(land.peak_value() == land.reward(top.center));
  for (std::size_t k = 1; k < land.optima().size(); ++k) CHECK(land.optima()[k].height < top.height);
  CHECK_THROWS_AS(Landscape({1, 0, 0.0}), InvalidSpace);
  CHECK_THROWS_AS(Landscape({1, 4, 0.2}), InvalidSpace);
  CHECK_THROWS_AS(land.reward(Configuration{{1, 2}}), ArityMismatch);
}

TEST_CASE("exhaustive_best agrees with an independent brute force") {
  const auto& fx = load_fixture_subspaces();
  const HardwareConstraints hc;
  Rng rng(3);
  for (int t = 0; t < 12; ++t) {
    std::vector<std::vector<int>> ranges;
    for (const auto& s : fx.full->specs()) {
      const auto& r = s.range();
      const auto i = rng.below(r.size());
      ranges.push_back(i + 1 < r.size() && rng.below(2) ? std::vector<int>{r[i], r[i + 1]} : std::vector<int>{r[i]});
    }
    const Subspace sub(fx.full, ranges);
    const LandscapeParams p{rng.next(), 4, t % 2 ? 0.02 : 0.0};
    const auto got = exhaustive_best(sub, p, hc);
    const auto want = brute(sub, p, hc);
    CHECK(got.first == want.first);
    CHECK(got.second == want.second);
  }
}

TEST_CASE("exhaustive_best tie-break and size limit") {
  // Every configuration is infeasible, so all rewards tie at zero.
  const Subspace sub(fixture_space(), {{9}, {9}, {64, 128}, {1}, {1}, {1, 2}, {3}, {6}, {4}, {6}});
  const auto [c, r] = exhaustive_best(sub, {1, 4, 0.0}, {});
  CHECK(r == 0.0);
  CHECK(c == Configuration{{9, 9, 64, 1, 1, 1, 3, 6, 4, 6}});
  CHECK_THROWS_AS(exhaustive_best(Subspace::full(fixture_space()), {1, 4, 0.0}, {}), SpaceTooLarge);
}

TEST_CASE("gated_reward skips training for infeasible configurations") {
  struct Counting : Trainer {
    mutable int calls = 0;
    double train(const Configuration&, int) const override {
      ++calls;
      return 0.5;
    }
  } t;
  CHECK(gated_reward(t, {}, Configuration{{9, 9, 128, 1, 1, 2, 3, 6, 4, 6}}) == 0.0);
  CHECK(t.calls == 0);
  CHECK(gated_reward(t, {}, mid()) == 0.5);
  CHECK(t.calls == 1);
}

}
