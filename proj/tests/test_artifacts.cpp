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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ponas/artifacts.hpp"
#include "ponas/sim.hpp"

using namespace ponas;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << s;
}

// Fresh artifact directory from a small three-block run.
fs::path fresh(const std::string& name) {
  static const RunArtifacts a = [] {
    Scenario sc;
    for (int i = 1; i <= 4; ++i) sc.miners.push_back({"m" + std::to_string(i)});
    sc.miners.push_back({"w", 0.5});
    sc.budget.episodes = 60;
    sc.rounds = 3;
    sc.fee_rate = 0.1;
    sc.seeds = SeedSet::from_base(8);
    return run(sc);
  }();
  const fs::path dir = fs::temp_directory_path() / ("ponas_artifacts_" + name);
  fs::remove_all(dir);
  write_artifacts(dir, a);
  return dir;
}

std::string replace_first(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

} // namespace

TEST_SUITE("artifacts") {

TEST_CASE("written artifacts validate") {
  const auto dir = fresh("ok");
  const auto r = validate_artifacts(dir);
  CHECK(r.ok);
  CHECK(r.invariant.empty());
  const auto blocks = slurp(dir / "blocks.log");
  CHECK(blocks.find("end blocks=3 head=") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("missing file") {
  const auto dir = fresh("missing");
  fs::remove(dir / "shares.csv");
  CHECK(validate_artifacts(dir).invariant == "artifacts present");
  fs::remove_all(dir);
}

TEST_CASE("a decreasing best curve breaks monotonicity") {
  const auto dir = fresh("mono");
  std::istringstream in(slurp(dir / "episodes.csv"));
  std::string out, line;
  int n = 0;
  while (std::getline(in, line)) {
    // zero the best_so_far of the 40th data row
    if (++n == 41) {
      std::vector<std::string> f;
      std::string cur;
      for (char c : line) {
        if (c == ',') f.push_back(cur), cur.clear();
        else cur.push_back(c);
      }
      f.push_back(cur);
      f[4] = "0";
      f[5] = "0";
      line.clear();
      for (std::size_t i = 0; i < f.size(); ++i) line += (i ? "," : "") + f[i];
    }
    out += line + "\n";
  }
  spit(dir / "episodes.csv", out);
  CHECK(validate_artifacts(dir).invariant == "monotonicity");
  fs::remove_all(dir);
}

TEST_CASE("truncated or tampered chain") {
  auto dir = fresh("trunc");
  const auto text = slurp(dir / "blocks.log");
  spit(dir / "blocks.log", text.substr(0, text.size() / 2));
  CHECK(validate_artifacts(dir).invariant == "chain linkage");

  spit(dir / "blocks.log", replace_first(text, "task=", "task=x"));
  CHECK(validate_artifacts(dir).invariant == "chain linkage");

  // drop the middle block but keep the trailer
  std::istringstream in(text);
  std::string line, out;
  int n = 0;
  while (std::getline(in, line))
    if (n++ != 1) out += line + "\n";
  spit(dir / "blocks.log", out);
  CHECK(validate_artifacts(dir).invariant == "chain linkage");
  fs::remove_all(dir);
}

TEST_CASE("late commitment fails the audit") {
  const auto dir = fresh("audit");
  auto text = slurp(dir / "blocks.log");
  const auto at = text.find("commit_tick=");
  const auto end = text.find(' ', at);
  text.replace(at, end - at, "commit_tick=999999");
  spit(dir / "blocks.log", text);
  CHECK(validate_artifacts(dir).invariant == "commitment audit");
  fs::remove_all(dir);
}

TEST_CASE("inflated share breaks conservation") {
  const auto dir = fresh("shares");
  const auto text = slurp(dir / "shares.csv");
  spit(dir / "shares.csv", replace_first(text, ",manager,", ",manager,1") );
  CHECK(validate_artifacts(dir).invariant == "share conservation");
  fs::remove_all(dir);
}

}
