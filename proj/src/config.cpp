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

#include "ponas/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ponas/error.hpp"

namespace ponas {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "miners",         "strengths",      "backups",        "seeds",      "episodes",  "epochs",
      "blocks",         "latency_ticks",  "departures",     "joins",      "lut_max",   "throughput_min",
      "noise",          "optima",         "fee_rate",       "monitor_threshold", "monitor_warmup", "partition",
      "policy",         "tasks",          "learning_rate",  "baseline_decay",    "pool_id",        "space"};
  return keys;
}

json parse_object(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'");
  }
  return j;
}

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type");
  }
}

template <class T>
T field_of(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string(where) + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + ": '" + key + "' has the wrong type");
  }
}

SpacePtr space_from(const json& j) {
  if (!j.contains("space")) return fixture_space();
  const json& s = j.at("space");
  if (s.is_string()) {
    if (s.get<std::string>() == "fixture") return fixture_space();
    throw ConfigError("space must be \"fixture\" or a list of {name, range}");
  }
  if (!s.is_array()) throw ConfigError("space must be \"fixture\" or a list of {name, range}");
  std::vector<HyperparameterSpec> specs;
  try {
    for (const auto& h : s)
      specs.emplace_back(field_of<std::string>(h, "name", "space"), field_of<std::vector<int>>(h, "range", "space"));
    return std::make_shared<const SearchSpace>(std::move(specs));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("space: ") + e.what());
  }
}

std::vector<MinerProfile> miners_from(const json& j) {
  std::vector<MinerProfile> miners;
  const json m = j.contains("miners") ? j.at("miners") : json(1);
  if (m.is_number_integer()) {
    const auto n = m.get<long long>();
    if (n < 1 || n > 100000) throw ConfigError("miners must be between 1 and 100000");
    for (long long i = 1; i <= n; ++i) miners.push_back({"m" + std::to_string(i)});
  } else if (m.is_array()) {
    for (const auto& e : m) {
      if (e.is_string()) {
        miners.push_back({e.get<std::string>()});
      } else if (e.is_object()) {
        MinerProfile p{field_of<std::string>(e, "id", "miners")};
        p.strength = get<double>(e, "strength", 1.0);
        const auto role = get<std::string>(e, "role", "explorer");
        if (role == "backup")
          p.role = Role::Backup;
        else if (role != "explorer")
          throw ConfigError("miners: role must be \"explorer\" or \"backup\"");
        miners.push_back(std::move(p));
      } else {
        throw ConfigError("miners entries must be ids or objects");
      }
    }
  } else {
    throw ConfigError("miners must be a count or a list");
  }

  if (j.contains("strengths")) {
    const auto s = get<std::vector<double>>(j, "strengths", {});
    if (s.size() != miners.size()) throw ConfigError("strengths must have one entry per miner");
    for (std::size_t i = 0; i < s.size(); ++i) miners[i].strength = s[i];
  }
  for (const auto& id : get<std::vector<std::string>>(j, "backups", {})) {
    auto it = std::find_if(miners.begin(), miners.end(), [&](const MinerProfile& p) { return p.id == id; });
    if (it == miners.end()) throw ConfigError("backups names unknown miner " + id);
    it->role = Role::Backup;
  }
  return miners;
}

SeedSet seeds_from(const json& j, std::uint64_t base) {
  SeedSet s = SeedSet::from_base(base);
  if (!j.contains("seeds")) return s;
  const json& o = j.at("seeds");
  if (!o.is_object()) throw ConfigError("seeds must be an object");
  for (const auto& [key, value] : o.items()) {
    if (!value.is_number_unsigned()) throw ConfigError("seeds." + key + " must be a non-negative integer");
    const auto v = value.get<std::uint64_t>();
    if (key == "landscape")
      s.landscape = v;
    else if (key == "partition")
      s.partition = v;
    else if (key == "search")
      s.search = v;
    else if (key == "exploit")
      s.exploit = v;
    else
      throw ConfigError("unknown seed '" + key + "'");
  }
  return s;
}

} // namespace

Scenario parse_scenario(std::string_view json_text, std::uint64_t seed) {
  const json j = parse_object(json_text);
  Scenario sc;
  sc.space = space_from(j);
  sc.miners = miners_from(j);
  sc.seeds = seeds_from(j, seed);
  sc.budget.episodes = get<int>(j, "episodes", sc.budget.episodes);
  sc.budget.epochs_per_episode = get<int>(j, "epochs", sc.budget.epochs_per_episode);
  sc.rounds = get<int>(j, "blocks", sc.rounds);
  sc.latency = get<int>(j, "latency_ticks", sc.latency);
  if (j.contains("lut_max") && !j.at("lut_max").is_number_unsigned())
    throw ConfigError("lut_max must be a non-negative integer");
  sc.constraints.lut_max = get<std::uint64_t>(j, "lut_max", sc.constraints.lut_max);
  sc.constraints.throughput_min = get<double>(j, "throughput_min", sc.constraints.throughput_min);
  sc.noise = get<double>(j, "noise", sc.noise);
  sc.optima = get<int>(j, "optima", sc.optima);
  sc.fee_rate = get<double>(j, "fee_rate", sc.fee_rate);
  sc.monitor.threshold = get<double>(j, "monitor_threshold", sc.monitor.threshold);
  sc.monitor.warmup = get<int>(j, "monitor_warmup", sc.monitor.warmup);
  sc.learning_rate = get<double>(j, "learning_rate", sc.learning_rate);
  sc.baseline_decay = get<double>(j, "baseline_decay", sc.baseline_decay);
  sc.pool_id = get<std::string>(j, "pool_id", sc.pool_id);

  const auto mode = get<std::string>(j, "partition", "random");
  if (mode == "random")
    sc.partition = PartitionMode::Random;
  else if (mode == "full")
    sc.partition = PartitionMode::Full;
  else if (mode == "fixture")
    sc.partition = PartitionMode::Fixture;
  else
    throw ConfigError("partition must be \"random\", \"full\" or \"fixture\"");

  const auto policy = get<std::string>(j, "policy", "collaborative");
  if (policy == "collaborative")
    sc.policy = WeakPolicy::Collaborative;
  else if (policy == "naive")
    sc.policy = WeakPolicy::Naive;
  else
    throw ConfigError("policy must be \"collaborative\" or \"naive\"");

  if (j.contains("departures")) {
    if (!j.at("departures").is_array()) throw ConfigError("departures must be a list");
    for (const auto& d : j.at("departures"))
      sc.departures.push_back({field_of<std::int64_t>(d, "tick", "departures"), field_of<std::string>(d, "miner", "departures")});
  }
  if (j.contains("joins")) {
    if (!j.at("joins").is_array()) throw ConfigError("joins must be a list");
    for (const auto& a : j.at("joins")) {
      MinerProfile p{field_of<std::string>(a, "id", "joins")};
      p.strength = get<double>(a, "strength", 1.0);
      sc.joins.push_back({field_of<std::int64_t>(a, "tick", "joins"), std::move(p)});
    }
  }
  if (j.contains("tasks")) {
    if (!j.at("tasks").is_array()) throw ConfigError("tasks must be a list");
    for (const auto& t : j.at("tasks")) {
      sc.tasks.push_back(Task{field_of<std::string>(t, "id", "tasks"), field_of<double>(t, "difficulty", "tasks"),
                              field_of<double>(t, "reward", "tasks"), sc.space, sc.constraints});
    }
  }

  try {
    sc.validate();
  } catch (const InvalidScenario& e) {
    throw ConfigError(e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed) {
  return parse_scenario(read_text(path), seed);
}

SpacePtr parse_space(std::string_view json_text) { return space_from(parse_object(json_text)); }

SpacePtr load_space(const std::filesystem::path& path) { return parse_space(read_text(path)); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace ponas
