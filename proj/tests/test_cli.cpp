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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ponas/cli.hpp"
#include "ponas/space.hpp"

using namespace ponas;
namespace fs = std::filesystem;

namespace {

int cli(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "ponas");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, e;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, e);
  if (err) *err = e.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const std::string kPool9 = std::string(PONAS_CONFIG_DIR) + "/pool9.json";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("partition tables") {
  const fs::path dir = fs::temp_directory_path() / "ponas_cli_partition";
  fs::create_directories(dir);
  REQUIRE(cli({"partition", "--config", kPool9, "--seed", "3", "--miners", "9", "--out", (dir / "t9").string()}) == 0);
  const auto rows = parse_table(slurp(dir / "t9"));
  REQUIRE(rows.size() == 9);
  const auto full = fixture_space();
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.ranges.size(); ++j)
      for (int v : r.ranges[j]) {
        const auto& fr = full->spec(j).range();
        CHECK(std::find(fr.begin(), fr.end(), v) != fr.end());
      }
  }
  REQUIRE(cli({"partition", "--config", kPool9, "--seed", "3", "--miners", "1", "--out", (dir / "t1").string()}) == 0);
  CHECK(parse_table(slurp(dir / "t1")).size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit 2") {
  std::string err;
  CHECK(cli({"run", "--config", kPool9, "--out-dir", "/tmp/ponas_cli_x"}, &err) == kExitConfig);
  CHECK(err.find("--seed") != std::string::npos);
  CHECK(cli({"partition", "--config", kPool9, "--seed", "1", "--miners", "0", "--out", "/tmp/x"}) == kExitConfig);
  CHECK(cli({"launch"}) == kExitConfig);
}

TEST_CASE("unwritable output is a runtime error") {
  CHECK(cli({"partition", "--config", kPool9, "--seed", "1", "--miners", "2", "--out", "/nonexistent/dir/t"}) ==
        kExitRuntime);
}

}
