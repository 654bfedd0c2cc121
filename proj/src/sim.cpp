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

#include "ponas/sim.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "ponas/error.hpp"
#include "ponas/oracle.hpp"
#include "ponas/random.hpp"

namespace ponas {

std::string_view to_string(PartitionMode m) {
  switch (m) {
  case PartitionMode::Random: return "random";
  case PartitionMode::Full: return "full";
  case PartitionMode::Fixture: return "fixture";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
  case EventKind::EpisodeDone: return "EpisodeDone";
  case EventKind::BestBroadcast: return "BestBroadcast";
  case EventKind::Commit: return "Commit";
  case EventKind::Submit: return "Submit";
  case EventKind::PhaseTick: return "PhaseTick";
  case EventKind::MinerDeparture: return "MinerDeparture";
  case EventKind::MinerJoin: return "MinerJoin";
  }
  return "?";
}

SeedSet SeedSet::from_base(std::uint64_t base) {
  return {derive_seed(base, 1), derive_seed(base, 2), derive_seed(base, 3), derive_seed(base, 4)};
}

void Scenario::validate() const {
  if (miners.empty()) throw InvalidScenario("scenario has no miners");
  std::set<std::string> ids;
  bool searcher = false;
  for (const auto& m : miners) {
    m.validate();
    if (!ids.insert(m.id).second) throw InvalidScenario("duplicate miner id " + m.id);
    if (m.online && m.strong() && m.role != Role::Backup) searcher = true;
  }
  if (!searcher) throw InvalidScenario("at least one online strong miner must search");
  for (const auto& j : joins) {
    j.profile.validate();
    if (j.tick < 0 || j.tick >= horizon()) throw InvalidScenario("join of " + j.profile.id + " outside the run");
    ids.insert(j.profile.id);
  }
  for (const auto& d : departures) {
    if (d.tick < 0 || d.tick >= horizon()) throw InvalidScenario("departure of " + d.miner + " outside the run");
    if (d.miner != kLeader && !ids.count(d.miner)) throw InvalidScenario("departure of unknown miner " + d.miner);
  }
  try {
    budget.validate();
    constraints.validate();
    LandscapeParams{0, optima, noise}.validate();
  } catch (const InvalidSpace& e) {
    throw InvalidScenario(e.what());
  }
  if (rounds < 1) throw InvalidScenario("at least one block round is required");
  if (latency < 0) throw InvalidScenario("latency must not be negative");
  if (!(fee_rate >= 0.0 && fee_rate < 1.0)) throw InvalidScenario("fee_rate must lie in [0, 1)");
  if (!(monitor.threshold > 0.0)) throw InvalidScenario("monitor threshold must be positive");
  if (monitor.warmup < 0) throw InvalidScenario("monitor warm-up must not be negative");
  if (!(learning_rate > 0.0)) throw InvalidScenario("learning rate must be positive");
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0)) throw InvalidScenario("baseline decay must lie in [0, 1)");
  if (pool_id.empty()) throw InvalidScenario("pool id must not be empty");
  for (const auto& t : tasks) t.validate();
  if (space && space->size() != field::kCount)
    throw InvalidScenario("the surrogate landscape needs a " + std::to_string(field::kCount) + "-field space");
  if (partition == PartitionMode::Fixture && space && space != fixture_space())
    throw InvalidScenario("fixture partitioning needs the fixture space");
}

void EventQueue::push(std::int64_t time, EventKind kind, decltype(Event::payload) payload) {
  heap_.push(Event{time, next_seq_++, kind, std::move(payload)});
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

std::vector<double> RunArtifacts::best_curve(int round) const {
  int last = 0;
  for (const auto& r : episodes)
    if (r.round == round) last = std::max(last, r.episode);
  std::vector<double> curve(static_cast<std::size_t>(last), 0.0);
  for (const auto& r : episodes) {
    if (r.round != round) continue;
    auto& v = curve[static_cast<std::size_t>(r.episode - 1)];
    v = std::max(v, r.best_so_far);
  }
  for (std::size_t i = 1; i < curve.size(); ++i) curve[i] = std::max(curve[i], curve[i - 1]);
  return curve;
}

namespace {

std::uint64_t id_stream(std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Fixed set of threads that run index ranges to completion, one batch at a time.
class WorkerPool {
public:
  explicit WorkerPool(int n) {
    for (int i = 0; i < n; ++i) threads_.emplace_back([this] { loop(); });
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (threads_.empty() || count < 2) {
      for (std::size_t i = 0; i < count; ++i) fn(i);
      return;
    }
    std::unique_lock lock(mu_);
    fn_ = &fn;
    count_ = count;
    next_ = 0;
    active_ = threads_.size();
    error_ = nullptr;
    ++generation_;
    wake_.notify_all();
    done_.wait(lock, [this] { return active_ == 0; });
    fn_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

private:
  void loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t)>* fn = nullptr;
      std::size_t count = 0;
      {
        std::unique_lock lock(mu_);
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        fn = fn_;
        count = count_;
      }
      for (std::size_t i = next_.fetch_add(1); i < count; i = next_.fetch_add(1)) {
        try {
          (*fn)(i);
        } catch (...) {
          std::lock_guard lock(mu_);
          if (!error_) error_ = std::current_exception();
        }
      }
      std::lock_guard lock(mu_);
      if (--active_ == 0) done_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable wake_, done_;
  const std::function<void(std::size_t)>* fn_ = nullptr;
  std::size_t count_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t active_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

struct Cadence {
  std::vector<int> ticks;
  std::size_t next = 0;

  // Start offset of the episode completing at `offset`, if one does.
  std::optional<int> due(int offset) {
    while (next < ticks.size() && ticks[next] < offset) ++next;
    if (next == ticks.size() || ticks[next] != offset) return std::nullopt;
    const int start = next == 0 ? 0 : ticks[next - 1];
    ++next;
    return start;
  }
};

struct Candidate {
  Configuration config;
  double reward = 0.0;
  std::string finder;
  std::int64_t arrival = 0;
  bool accepted = false;
};

struct WorkItem {
  std::string miner;
  int slot = -1;
  int start = 0;
};

} // namespace

struct Simulator::Impl {
  Impl(Scenario s, int workers)
      : sc(std::move(s)), pool(workers > 1 ? workers : 0) {
    sc.validate();
    space = sc.space ? sc.space : fixture_space();
    for (auto t : sc.tasks) {
      t.space = space;
      t.constraints = sc.constraints;
      tasks.push_back(std::move(t));
    }
    if (tasks.empty()) tasks.push_back(Task{"cifar10-cnn", 1.0, 1.0, space, sc.constraints});
    trainer = std::make_unique<SurrogateTrainer>(LandscapeParams{sc.seeds.landscape, sc.optima, sc.noise});
    roster = sc.miners;
    for (const auto& d : sc.departures) queue.push(d.tick, EventKind::MinerDeparture, d);
    for (const auto& j : sc.joins) queue.push(j.tick, EventKind::MinerJoin, j);
  }

  Scenario sc;
  WorkerPool pool;
  EventQueue queue;
  SpacePtr space;
  std::vector<Task> tasks;
  std::unique_ptr<SurrogateTrainer> trainer;
  std::vector<MinerProfile> roster;
  Chain chain;
  CommitmentSet commitments;
  RunArtifacts out;
  bool ran = false;

  int round = -1;
  std::int64_t t0 = 0;
  Task task;
  std::optional<PoolState> state;
  std::map<std::string, Cadence> cadence;
  std::map<std::string, Rng> exploit_rng;
  std::map<std::string, std::vector<std::pair<std::int64_t, Configuration>>> deliveries;
  std::vector<Candidate> candidates;
  std::vector<Submission> submissions;
  std::optional<std::size_t> submitted;
  std::set<std::size_t> unavailable_logged;
  int late_commits = 0;

  int episodes() const { return sc.budget.episodes; }

  int offset(std::int64_t t) const { return static_cast<int>(t % sc.ticks_per_round()); }

  Phase phase_at(std::int64_t t) const {
    const int o = offset(t);
    if (o == 0) return Phase::Init;
    return o <= episodes() ? Phase::Training : Phase::Validation;
  }

  MinerProfile* roster_entry(std::string_view id) {
    for (auto& m : roster)
      if (m.id == id) return &m;
    return nullptr;
  }

  void log_phase(std::int64_t t, Phase p) { out.phases.push_back({t, round, p}); }

  RunArtifacts run() {
    if (ran) throw InvalidScenario("a simulator runs once");
    ran = true;
    queue.push(0, EventKind::PhaseTick, PhaseTickMsg{});
    while (!queue.empty()) {
      const std::int64_t t = queue.top().time;
      while (!queue.empty() && queue.top().time == t) dispatch(queue.pop());
      end_of_tick(t);
    }
    return std::move(out);
  }

  void dispatch(Event e) {
    switch (e.kind) {
    case EventKind::PhaseTick: on_phase_tick(e.time); break;
    case EventKind::EpisodeDone: on_episode_done(e.time, std::get<EpisodeDone>(e.payload)); break;
    case EventKind::BestBroadcast: {
      auto& b = std::get<BestBroadcast>(e.payload);
      deliveries[b.to].emplace_back(e.time, std::move(b.config));
      break;
    }
    case EventKind::Commit: on_commit(e.time, std::get<CommitMsg>(e.payload)); break;
    case EventKind::Submit: on_submit(std::get<SubmitMsg>(e.payload)); break;
    case EventKind::MinerDeparture: on_departure(std::get<Departure>(e.payload)); break;
    case EventKind::MinerJoin: on_join(std::get<Arrival>(e.payload)); break;
    }
  }

  void on_phase_tick(std::int64_t t) {
    const int o = offset(t);
    if (o == 0) {
      begin_round(t);
    } else if (o <= episodes()) {
      if (o == 1) log_phase(t, advance(Phase::Init, PhaseEvent::TaskSelected));
      training_tick(t, o);
    } else {
      log_phase(t, advance(Phase::Training, PhaseEvent::BudgetElapsed));
      queue.push(t, EventKind::Submit, SubmitMsg{round});
    }
  }

  void begin_round(std::int64_t t) {
    round = static_cast<int>(t / sc.ticks_per_round());
    t0 = t;
    log_phase(t, Phase::Init);
    task = rank_tasks(tasks).front();
    commitments.clear();
    candidates.clear();
    submissions.clear();
    submitted.reset();
    deliveries.clear();
    exploit_rng.clear();
    unavailable_logged.clear();
    late_commits = 0;

    AssignOptions opts{sc.policy, derive_seed(sc.seeds.search, static_cast<std::uint64_t>(round)), sc.learning_rate,
                       sc.baseline_decay};
    state.reset();
    const std::size_t n = explorer_count(roster, sc.policy);
    const bool strong_left = std::any_of(roster.begin(), roster.end(), [](const MinerProfile& m) {
      return m.online && m.strong() && m.role != Role::Backup;
    });
    if (n == 0 || !strong_left) return; // nothing is mined this round
    switch (sc.partition) {
    case PartitionMode::Random: {
      Rng rng(derive_seed(sc.seeds.partition, static_cast<std::uint64_t>(round)));
      state = assign(space, roster, rng, opts);
      break;
    }
    case PartitionMode::Full:
      state = assign_subspaces(std::vector<Subspace>(n, Subspace::full(space)), roster, opts);
      break;
    case PartitionMode::Fixture: {
      // Fewer searchers take the first cells; more wrap around.
      const auto& cells = load_fixture_subspaces().subspaces;
      std::vector<Subspace> use;
      for (std::size_t j = 0; j < n; ++j) use.push_back(cells[j % cells.size()]);
      state = assign_subspaces(std::move(use), roster, opts);
      break;
    }
    }
    cadence.clear();
    for (const auto& m : roster) cadence[m.id] = Cadence{completion_ticks(m.strength, episodes())};
  }

  void training_tick(std::int64_t t, int o) {
    if (!state) return;
    std::vector<WorkItem> items;
    for (const auto& m : state->miners) {
      if (!m.online) continue;
      int slot = -1;
      if (auto it = state->assignments.find(m.id); it != state->assignments.end()) {
        const Slot& s = state->slots[it->second];
        if (s.holder && *s.holder == m.id) slot = static_cast<int>(it->second);
      }
      if (slot < 0 && m.role != Role::Exploiter) continue;
      const auto start = cadence[m.id].due(o);
      if (!start) continue;
      if (slot < 0) {
        exploit_rng.try_emplace(m.id, derive_seed(derive_seed(sc.seeds.exploit, static_cast<std::uint64_t>(round)),
                                                  id_stream(m.id)));
      }
      items.push_back({m.id, slot, *start});
    }

    std::vector<EpisodeRecord> results(items.size());
    pool.run(items.size(), [&](std::size_t i) { results[i] = compute(items[i]); });
    for (std::size_t i = 0; i < items.size(); ++i) {
      queue.push(t, EventKind::EpisodeDone, EpisodeDone{items[i].miner, items[i].slot, std::move(results[i])});
    }
  }

  // Runs on a worker: touches only the item's own slot or random stream.
  EpisodeRecord compute(const WorkItem& item) {
    const int epochs = sc.budget.epochs_per_episode;
    if (item.slot >= 0) return state->slots[static_cast<std::size_t>(item.slot)].search.step(*trainer, task.constraints, epochs);

    Rng& rng = exploit_rng.find(item.miner)->second;
    const Configuration* base = nullptr;
    if (auto it = deliveries.find(item.miner); it != deliveries.end()) {
      for (const auto& [tick, config] : it->second)
        if (tick <= t0 + item.start) base = &config;
    }
    Configuration c;
    if (base) {
      c = exploit_step(*base, *space, rng);
    } else {
      for (const auto& spec : space->specs()) c.values.push_back(spec.range()[rng.below(spec.range().size())]);
    }
    EpisodeRecord r;
    r.episode = static_cast<int>(state->contribution.at(item.miner)) + 1;
    r.reward = gated_reward(*trainer, task.constraints, c, epochs);
    r.best_so_far = std::max(state->miner_best(item.miner), r.reward);
    r.config = std::move(c);
    return r;
  }

  void on_episode_done(std::int64_t t, const EpisodeDone& done) {
    const bool improved = collect(*state, done.record, done.miner);
    EpisodeRow row{round, offset(t), done.miner, done.slot, done.record.reward, state->miner_best(done.miner),
                   std::nullopt};
    if (done.slot >= 0) row.slot_best = state->slots[static_cast<std::size_t>(done.slot)].search.best_reward();
    out.episodes.push_back(std::move(row));
    if (!improved) return;

    for (const auto& m : state->miners) {
      if (m.role == Role::Exploiter) queue.push(t + sc.latency, EventKind::BestBroadcast, BestBroadcast{m.id, done.record.config});
    }
    candidates.push_back({done.record.config, done.record.reward, done.miner, t + sc.latency, false});
    queue.push(t + sc.latency, EventKind::Commit,
               CommitMsg{round, candidates.size() - 1, done.record.config, done.record.reward, done.miner});
  }

  void on_commit(std::int64_t t, const CommitMsg& msg) {
    Commitment c{commitment_digest(msg.config, msg.claimed, sc.pool_id), sc.pool_id, Phase::Init, t};
    const bool accepted = commitments.commit(std::move(c), phase_at(t)) == CommitResult::Accepted;
    if (msg.round != round || msg.candidate >= candidates.size()) return;
    candidates[msg.candidate].accepted = accepted;
    if (!accepted) ++late_commits;
  }

  void on_submit(const SubmitMsg& msg) {
    if (msg.round != round) return;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!candidates[i].accepted) continue;
      if (!submitted || candidates[i].reward > candidates[*submitted].reward) submitted = i;
    }
    if (submitted) {
      const auto& c = candidates[*submitted];
      submissions.push_back({c.config, c.reward, sc.pool_id});
    }
  }

  void on_departure(const Departure& d) {
    std::string id = d.miner;
    if (id == kLeader) {
      id.clear();
      if (state) {
        std::optional<std::size_t> lead;
        for (std::size_t j = 0; j < state->slots.size(); ++j) {
          if (!state->slots[j].holder) continue;
          if (!lead || state->live_value(j) > state->live_value(*lead)) lead = j;
        }
        if (lead) id = *state->slots[*lead].holder;
      }
      if (id.empty()) return;
    }
    MinerProfile* m = roster_entry(id);
    if (!m || !m->online) return;
    m->online = false;
    if (state && state->has_miner(id)) depart(*state, id);
  }

  void on_join(const Arrival& a) {
    if (MinerProfile* m = roster_entry(a.profile.id)) {
      if (m->online) return;
      m->online = true;
      if (state && state->has_miner(m->id)) rejoin(*state, m->id);
      return;
    }
    MinerProfile p = a.profile;
    p.online = true;
    roster.push_back(p);
    cadence[p.id] = Cadence{completion_ticks(p.strength, episodes())};
    if (state) join(*state, p);
  }

  void end_of_tick(std::int64_t t) {
    const int o = offset(t);
    if (state && o >= 1 && o <= episodes()) {
      watch(o);
    } else if (o == episodes() + 1) {
      close_round();
    }
    if (t + 1 < sc.horizon()) queue.push(t + 1, EventKind::PhaseTick, PhaseTickMsg{});
  }

  void watch(int o) {
    if (state->slots.size() >= 2) {
      try {
        for (auto& a : monitor(*state, o, sc.monitor)) out.alerts.push_back({round, std::move(a)});
        out.stddev.push_back({round, state->stddev_series.back()});
      } catch (const TooFewMiners&) {
      }
    }
    for (std::size_t j = 0; j < state->slots.size(); ++j) {
      const Slot& s = state->slots[j];
      if (s.holder) continue;
      const std::string departed = s.last_holder;
      try {
        const std::string heir = promote_backup(*state, departed, state->miners);
        out.alerts.push_back({round, {o, AlertType::BackupPromoted, heir}});
        unavailable_logged.erase(j);
      } catch (const NoBackupAvailable&) {
        if (unavailable_logged.insert(j).second)
          out.alerts.push_back({round, {o, AlertType::BackupUnavailable, departed}});
      }
    }
  }

  void close_round() {
    RoundSummary summary{round, task.id, 0.0, "", std::nullopt, 0, late_commits, std::nullopt};
    late_commits = 0;
    if (state) {
      summary.best_global = state->best_reward;
      summary.best_miner = state->best_miner;
      summary.best_config = state->best_config;
    }
    const std::int64_t training_end = t0 + episodes();
    const Evaluator evaluator = [&](const Configuration& c) {
      return gated_reward(*trainer, task.constraints, c, sc.budget.epochs_per_episode);
    };
    auto outcome = validate_round(submissions, commitments, evaluator);
    summary.evaluations = outcome.evaluations;
    if (outcome.block && state) {
      outcome.block->task = task.id;
      const Block& b = chain.append(std::move(*outcome.block));
      const Candidate& c = candidates[*submitted];
      out.blocks.push_back({b, round, c.finder, task.task_reward, c.arrival, training_end});
      summary.height = b.height;
      const auto share = distribute(*state, task.task_reward, sc.fee_rate);
      out.shares.push_back({round, b.height, "manager", share.manager, share.manager / task.task_reward});
      for (const auto& [id, amount] : share.miners)
        out.shares.push_back({round, b.height, id, amount, amount / task.task_reward});
    }
    out.rounds.push_back(std::move(summary));
    advance(Phase::Validation, PhaseEvent::RoundClosed);
  }
};

Simulator::Simulator(Scenario scenario, int workers) : impl_(std::make_unique<Impl>(std::move(scenario), workers)) {}

Simulator::~Simulator() = default;

void Simulator::inject_departure(std::int64_t tick, std::string miner) {
  if (tick < 0 || tick >= impl_->sc.horizon()) throw InvalidScenario("departure outside the run");
  if (miner != kLeader && !impl_->roster_entry(miner)) throw UnknownMiner("unknown miner " + miner);
  impl_->queue.push(tick, EventKind::MinerDeparture, Departure{tick, std::move(miner)});
}

void Simulator::inject_join(std::int64_t tick, MinerProfile profile) {
  if (tick < 0 || tick >= impl_->sc.horizon()) throw InvalidScenario("join outside the run");
  profile.validate();
  impl_->queue.push(tick, EventKind::MinerJoin, Arrival{tick, std::move(profile)});
}

RunArtifacts Simulator::run() { return impl_->run(); }

RunArtifacts run(const Scenario& scenario, int workers) {
  Simulator sim(scenario, workers);
  return sim.run();
}

} // namespace ponas
