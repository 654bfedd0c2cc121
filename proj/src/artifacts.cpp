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

#include "ponas/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ponas/chain.hpp"
#include "ponas/error.hpp"

namespace ponas {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_values(const Configuration& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c[i]);
  }
  return s;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

long long to_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("missing " + p.filename().string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  return lines;
}

struct LoggedBlock {
  BlockRecord rec;
  Digest digest{};
};

LoggedBlock parse_block(const std::string& line) {
  std::map<std::string, std::string> kv;
  for (const auto& tok : split(line, ' ')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("token without '=': " + tok);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto need = [&](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::invalid_argument(std::string("missing ") + k);
    return it->second;
  };
  LoggedBlock b;
  b.rec.block.height = static_cast<std::uint64_t>(to_int(need("height")));
  b.rec.round = static_cast<int>(to_int(need("round")));
  b.rec.block.task = need("task");
  b.rec.block.winner = need("winner");
  b.rec.finder = need("finder");
  b.rec.block.claimed = to_real(need("claim"));
  b.rec.block.validated_reward = to_real(need("validated"));
  b.rec.block_reward = to_real(need("block_reward"));
  for (const auto& v : split(need("config"), ',')) b.rec.block.winning_config.values.push_back(static_cast<int>(to_int(v)));
  b.rec.commit_tick = to_int(need("commit_tick"));
  b.rec.training_end = to_int(need("training_end"));
  b.rec.block.commitment = digest_from_hex(need("commitment"));
  b.rec.block.prev_digest = digest_from_hex(need("prev"));
  b.digest = digest_from_hex(need("digest"));
  return b;
}

ValidationReport fail(std::string invariant, std::string detail) { return {false, std::move(invariant), std::move(detail)}; }

ValidationReport check_monotonicity(const std::filesystem::path& dir) {
  const auto lines = read_lines(dir / "episodes.csv");
  if (lines.empty() || lines[0] != "round,episode,miner,slot,reward,best_so_far,slot_best")
    return fail("monotonicity", "episodes.csv header is missing");
  std::map<std::pair<long long, std::string>, double> miner_best;
  std::map<std::pair<long long, long long>, double> slot_best;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    const std::string where = "episodes.csv line " + std::to_string(i + 1);
    if (f.size() != 7) return fail("monotonicity", where + " is malformed");
    try {
      const long long round = to_int(f[0]);
      const double reward = to_real(f[4]);
      const double best = to_real(f[5]);
      if (best < reward) return fail("monotonicity", where + ": best_so_far below reward");
      auto [it, fresh] = miner_best.try_emplace({round, f[2]}, best);
      if (!fresh) {
        if (best < it->second) return fail("monotonicity", where + ": best_so_far of " + f[2] + " decreased");
        it->second = best;
      }
      const long long slot = to_int(f[3]);
      if (slot >= 0) {
        const double sb = to_real(f[6]);
        auto [st, sfresh] = slot_best.try_emplace({round, slot}, sb);
        if (!sfresh) {
          if (sb < st->second) return fail("monotonicity", where + ": best of slot " + f[3] + " decreased");
          st->second = sb;
        }
      }
    } catch (const std::exception& e) {
      return fail("monotonicity", where + ": " + e.what());
    }
  }
  return {};
}

} // namespace

void write_artifacts(const std::filesystem::path& dir, const RunArtifacts& a) {
  std::filesystem::create_directories(dir);

  auto ep = open_out(dir / "episodes.csv");
  ep << "round,episode,miner,slot,reward,best_so_far,slot_best\n";
  for (const auto& r : a.episodes) {
    ep << r.round << ',' << r.episode << ',' << r.miner << ',' << r.slot << ',' << real(r.reward) << ','
       << real(r.best_so_far) << ',' << (r.slot_best ? real(*r.slot_best) : "") << '\n';
  }

  auto sd = open_out(dir / "stddev.csv");
  sd << "round,episode,stddev,high_count\n";
  for (const auto& r : a.stddev)
    sd << r.round << ',' << r.point.episode << ',' << real(r.point.stddev) << ',' << r.point.high_count << '\n';

  auto bl = open_out(dir / "blocks.log");
  Digest head{};
  for (const auto& r : a.blocks) {
    const Block& b = r.block;
    head = b.digest();
    bl << "height=" << b.height << " round=" << r.round << " task=" << b.task << " winner=" << b.winner
       << " finder=" << r.finder << " claim=" << real(b.claimed) << " validated=" << real(b.validated_reward)
       << " block_reward=" << real(r.block_reward) << " config=" << join_values(b.winning_config)
       << " commit_tick=" << r.commit_tick << " training_end=" << r.training_end
       << " commitment=" << to_hex(b.commitment) << " prev=" << to_hex(b.prev_digest) << " digest=" << to_hex(head)
       << '\n';
  }
  bl << "end blocks=" << a.blocks.size() << " head=" << to_hex(head) << '\n';

  auto sh = open_out(dir / "shares.csv");
  sh << "round,height,party,amount,fraction\n";
  for (const auto& r : a.shares)
    sh << r.round << ',' << r.height << ',' << r.party << ',' << real(r.amount) << ',' << real(r.fraction) << '\n';

  auto al = open_out(dir / "alerts.log");
  al << "round,episode,type,miner\n";
  for (const auto& r : a.alerts)
    al << r.round << ',' << r.alert.episode << ',' << to_string(r.alert.type) << ',' << r.alert.miner << '\n';

  auto ph = open_out(dir / "phases.log");
  ph << "tick,round,phase\n";
  for (const auto& r : a.phases) ph << r.tick << ',' << r.round << ',' << to_string(r.phase) << '\n';

  for (auto* f : {&ep, &sd, &bl, &sh, &al, &ph}) {
    f->flush();
    if (!*f) throw std::runtime_error("failed writing artifacts under " + dir.string());
  }
}

ValidationReport validate_artifacts(const std::filesystem::path& dir) {
  for (const char* name : {"episodes.csv", "stddev.csv", "blocks.log", "shares.csv"}) {
    if (!std::filesystem::is_regular_file(dir / name)) return fail("artifacts present", std::string("missing ") + name);
  }

  if (auto r = check_monotonicity(dir); !r.ok) return r;

  // chain linkage
  std::vector<LoggedBlock> blocks;
  {
    const auto lines = read_lines(dir / "blocks.log");
    if (lines.empty() || lines.back().rfind("end ", 0) != 0) return fail("chain linkage", "blocks.log is truncated");
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
      try {
        blocks.push_back(parse_block(lines[i]));
      } catch (const std::exception& e) {
        return fail("chain linkage", "blocks.log line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
    Digest prev{};
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const Block& b = blocks[i].rec.block;
      if (b.height != i) return fail("chain linkage", "height " + std::to_string(b.height) + " out of sequence");
      if (b.prev_digest != prev) return fail("chain linkage", "block " + std::to_string(i) + " does not point at its predecessor");
      if (b.digest() != blocks[i].digest) return fail("chain linkage", "block " + std::to_string(i) + " header digest mismatch");
      prev = blocks[i].digest;
    }
    const std::string trailer = "end blocks=" + std::to_string(blocks.size()) + " head=" + to_hex(prev);
    if (lines.back() != trailer) return fail("chain linkage", "trailer does not match the blocks above it");
  }

  // commitment audit
  for (const auto& lb : blocks) {
    const auto& r = lb.rec;
    const std::string h = "block " + std::to_string(r.block.height);
    if (commitment_digest(r.block.winning_config, r.block.claimed, r.block.winner) != r.block.commitment)
      return fail("commitment audit", h + ": commitment does not match the revealed submission");
    if (r.commit_tick > r.training_end) return fail("commitment audit", h + ": commitment arrived after Training");
    if (!(r.block.validated_reward >= r.block.claimed)) return fail("commitment audit", h + ": claim not validated");
  }

  // share conservation
  {
    const auto lines = read_lines(dir / "shares.csv");
    if (lines.empty() || lines[0] != "round,height,party,amount,fraction")
      return fail("share conservation", "shares.csv header is missing");
    std::map<std::uint64_t, double> sums;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split(lines[i], ',');
      const std::string where = "shares.csv line " + std::to_string(i + 1);
      if (f.size() != 5) return fail("share conservation", where + " is malformed");
      try {
        const auto height = static_cast<std::uint64_t>(to_int(f[1]));
        const double amount = to_real(f[3]);
        if (amount < 0.0) return fail("share conservation", where + ": negative share");
        if (height >= blocks.size()) return fail("share conservation", where + ": no block at height " + f[1]);
        sums[height] += amount;
      } catch (const std::exception& e) {
        return fail("share conservation", where + ": " + e.what());
      }
    }
    for (const auto& lb : blocks) {
      const auto h = lb.rec.block.height;
      auto it = sums.find(h);
      if (it == sums.end()) return fail("share conservation", "block " + std::to_string(h) + " has no shares");
      const double want = lb.rec.block_reward;
      if (std::abs(it->second - want) > 1e-9 * std::abs(want))
        return fail("share conservation", "shares of block " + std::to_string(h) + " sum to " + real(it->second));
    }
  }
  return {};
}

} // namespace ponas
