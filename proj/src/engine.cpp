#include "aid/engine.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "aid/error.hpp"

namespace aid {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::AID: return "aid";
    case Strategy::AID_P: return "aid-p";
    case Strategy::AID_P_B: return "aid-p-b";
    case Strategy::TAGT: return "tagt";
  }
  return "aid";
}

Strategy parse_strategy(std::string_view s) {
  std::string k;
  for (char c : s) k += c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (k == "aid") return Strategy::AID;
  if (k == "aid-p") return Strategy::AID_P;
  if (k == "aid-p-b") return Strategy::AID_P_B;
  if (k == "tagt") return Strategy::TAGT;
  throw Error("unknown strategy '" + std::string(s) + "' (expected aid, aid-p, aid-p-b or tagt)");
}

void to_json(nlohmann::json& j, const RoundRecord& r) {
  j = {{"step", r.step},
       {"phase", r.phase},
       {"intervened", r.intervened},
       {"repetitions", r.repetitions},
       {"failing_runs", r.failing_runs},
       {"failure_stopped", r.failure_stopped},
       {"confirmed", r.confirmed},
       {"spurious", r.spurious},
       {"pruned", r.pruned}};
}

static void from_json(const nlohmann::json& j, RoundRecord& r) {
  r.step = j.at("step").get<std::size_t>();
  r.phase = j.at("phase").get<std::string>();
  r.intervened = j.at("intervened").get<std::vector<PredicateId>>();
  r.repetitions = j.at("repetitions").get<std::size_t>();
  r.failing_runs = j.at("failing_runs").get<std::size_t>();
  r.failure_stopped = j.at("failure_stopped").get<bool>();
  r.confirmed = j.value("confirmed", std::vector<PredicateId>{});
  r.spurious = j.value("spurious", std::vector<PredicateId>{});
  r.pruned = j.value("pruned", std::vector<PredicateId>{});
}

void to_json(nlohmann::json& j, const DiscoveryReport& r) {
  j = {{"version", r.version},
       {"strategy", to_string(r.strategy)},
       {"seed", r.seed},
       {"repetitions", r.repetitions},
       {"found", r.found()},
       {"causal_path", r.causal_path},
       {"spurious", r.spurious},
       {"n_interventions", r.n_interventions},
       {"rounds", r.rounds}};
}

void from_json(const nlohmann::json& j, DiscoveryReport& r) {
  r.version = j.value("version", std::string(kVersion));
  r.strategy = parse_strategy(j.at("strategy").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.repetitions = j.at("repetitions").get<std::size_t>();
  r.causal_path = j.at("causal_path").get<std::vector<PredicateId>>();
  r.spurious = j.at("spurious").get<std::set<PredicateId>>();
  r.n_interventions = j.at("n_interventions").get<std::size_t>();
  r.rounds.clear();
  for (const auto& e : j.value("rounds", nlohmann::json::array())) {
    RoundRecord rec;
    from_json(e, rec);
    r.rounds.push_back(std::move(rec));
  }
}

std::vector<std::size_t> interventional_prune(const std::vector<ExecutionRun>& runs,
                                              const std::vector<std::size_t>& intervened,
                                              const std::vector<InterventionUnit>& others,
                                              const AcmGraph& g) {
  NodeSet upstream(g.size());
  for (auto c : intervened) {
    upstream |= g.ancestors(c);
    upstream.set(c);
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < others.size(); ++k) {
    const auto& u = others[k];
    if (std::any_of(u.nodes.begin(), u.nodes.end(), [&](auto v) { return upstream.test(v); })) continue;
    bool violated = std::any_of(runs.begin(), runs.end(), [&](const ExecutionRun& r) {
      bool present = std::any_of(u.nodes.begin(), u.nodes.end(),
                                 [&](auto v) { return r.observed(g.id(v)); });
      return present != r.failed();
    });
    if (violated) out.push_back(k);
  }
  return out;
}

struct Engine::Pool {
  std::vector<InterventionUnit> units;
  std::vector<char> resolved;
  std::vector<std::size_t> causal;
  std::vector<std::size_t> spurious;
  bool prune = true;
  /// Branches at one junction: at most one can hold the cause, so the first
  /// confirmation settles the rest and a lone unconfirmed survivor is kept.
  bool branch_mode = false;
  std::string phase;

  void mark(std::size_t u, bool is_causal) {
    resolved[u] = 1;
    (is_causal ? causal : spurious).push_back(u);
  }
};

Engine::Engine(const AcmGraph& g, InterventionOracle& oracle, EngineOptions options)
    : g_(g), oracle_(oracle), opt_(std::move(options)), rng_(make_rng(opt_.seed)) {
  if (opt_.repetitions == 0) throw Error("repetitions must be at least 1");
}

std::vector<PredicateId> Engine::names(const std::vector<std::size_t>& nodes) const {
  std::vector<PredicateId> out;
  out.reserve(nodes.size());
  for (auto v : nodes) out.push_back(g_.id(v));
  return out;
}

std::vector<ExecutionRun> Engine::intervene(const std::vector<std::size_t>& nodes, const std::string& phase) {
  auto ids = names(nodes);
  for (const auto& id : ids)
    if (opt_.unsafe.count(id)) throw Error("refusing to intervene on unsafe predicate " + id);
  auto runs = oracle_.intervene(ids, opt_.repetitions);
  if (runs.empty()) throw Error("oracle returned no runs for intervention round " + std::to_string(rounds_.size() + 1));
  for (const auto& r : runs)
    for (const auto& id : ids)
      if (r.observed(id))
        throw Error("oracle run " + r.run_id + " still observes intervened predicate " + id);

  RoundRecord rec;
  rec.step = rounds_.size() + 1;
  rec.phase = phase;
  rec.intervened = std::move(ids);
  rec.repetitions = runs.size();
  rec.failing_runs = static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](auto& r) { return r.failed(); }));
  rec.failure_stopped = rec.failing_runs == 0;
  rounds_.push_back(std::move(rec));
  return runs;
}

bool Engine::stopped(const std::vector<ExecutionRun>& runs) const {
  return std::none_of(runs.begin(), runs.end(), [](const ExecutionRun& r) { return r.failed(); });
}

std::vector<std::size_t> Engine::order_units(const Pool& pool, std::vector<std::size_t> members) {
  std::vector<std::uint64_t> key(pool.units.size(), 0);
  for (auto m : members) key[m] = rng_();
  std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
    if (!pool.branch_mode) {
      auto la = g_.level(pool.units[a].head), lb = g_.level(pool.units[b].head);
      if (la != lb) return la < lb;
    }
    if (key[a] != key[b]) return key[a] < key[b];
    return a < b;
  });
  return members;
}

void Engine::giwp_rec(Pool& pool, std::vector<std::size_t> members, bool known_positive) {
  auto refine = [&] {
    members.erase(std::remove_if(members.begin(), members.end(), [&](auto u) { return pool.resolved[u] != 0; }),
                  members.end());
  };
  refine();
  while (!members.empty()) {
    if (pool.branch_mode && !pool.causal.empty()) break;
    if (pool.branch_mode && members.size() == 1 && pool.causal.empty() &&
        (known_positive || std::count(pool.resolved.begin(), pool.resolved.end(), 0) == 1)) {
      pool.mark(members.front(), true);
      break;
    }

    auto ordered = order_units(pool, members);
    std::vector<std::size_t> first(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>((ordered.size() + 1) / 2));
    std::vector<std::size_t> nodes;
    for (auto u : first) nodes.insert(nodes.end(), pool.units[u].nodes.begin(), pool.units[u].nodes.end());
    std::sort(nodes.begin(), nodes.end());

    auto runs = intervene(nodes, pool.phase);
    auto rec = rounds_.size() - 1;
    bool stop = stopped(runs);
    if (stop && first.size() == 1) {
      pool.mark(first.front(), true);
      rounds_[rec].confirmed.push_back(g_.id(pool.units[first.front()].head));
    } else if (!stop) {
      for (auto u : first) {
        pool.mark(u, false);
        for (auto v : pool.units[u].nodes) rounds_[rec].spurious.push_back(g_.id(v));
      }
    }

    if (pool.prune) {
      std::vector<std::size_t> other_ids;
      std::vector<InterventionUnit> others;
      for (std::size_t u = 0; u < pool.units.size(); ++u) {
        if (pool.resolved[u] || std::find(first.begin(), first.end(), u) != first.end()) continue;
        other_ids.push_back(u);
        others.push_back(pool.units[u]);
      }
      for (auto k : interventional_prune(runs, nodes, others, g_)) {
        pool.mark(other_ids[k], false);
        for (auto v : pool.units[other_ids[k]].nodes) rounds_[rec].pruned.push_back(g_.id(v));
      }
    }

    if (stop && first.size() > 1) giwp_rec(pool, first, true);
    refine();
  }
}

Engine::Outcome Engine::giwp(const std::vector<std::size_t>& candidates, const std::string& phase) {
  Pool pool;
  pool.phase = phase;
  pool.prune = opt_.strategy == Strategy::AID;
  for (auto c : candidates) {
    if (c == g_.failure()) throw Error("the failure predicate cannot be a candidate");
    pool.units.push_back({c, {c}});
  }
  pool.resolved.assign(pool.units.size(), 0);
  std::vector<std::size_t> all(pool.units.size());
  std::iota(all.begin(), all.end(), 0);
  giwp_rec(pool, all, false);

  Outcome out;
  for (auto u : pool.causal) out.causal.push_back(pool.units[u].head);
  for (auto u : pool.spurious) out.spurious.push_back(pool.units[u].head);
  return out;
}

Engine::Outcome Engine::branch_prune() {
  const auto n = g_.size();
  NodeSet alive(n), in_chain(n);
  Outcome out;
  for (std::size_t v = 0; v < n; ++v) {
    if (v == g_.failure() || opt_.unsafe.count(g_.id(v))) continue;
    if (g_.reaches(v, g_.failure()))
      alive.set(v);
    else
      out.spurious.push_back(v);
  }

  for (;;) {
    NodeSet remaining = alive - in_chain;
    if (remaining.none()) break;
    std::vector<std::size_t> minimal;
    for (auto v = remaining.find_first(); v != NodeSet::npos; v = remaining.find_next(v))
      if (!g_.ancestors(v).intersects(remaining)) minimal.push_back(v);

    if (minimal.size() == 1) {
      in_chain.set(minimal.front());
      out.causal.push_back(minimal.front());
    } else {
      Pool pool;
      pool.phase = "branch";
      pool.branch_mode = true;
      pool.prune = opt_.strategy == Strategy::AID;
      for (const auto& b : branches_for(g_, minimal, remaining)) pool.units.push_back({b.head, b.members});
      pool.resolved.assign(pool.units.size(), 0);
      std::vector<std::size_t> all(pool.units.size());
      std::iota(all.begin(), all.end(), 0);
      giwp_rec(pool, all, false);

      if (pool.causal.size() > 1) {
        std::string heads;
        for (auto u : pool.causal) heads += (heads.empty() ? "" : ", ") + g_.id(pool.units[u].head);
        throw AssumptionViolation("more than one branch stops the failure at the junction below {" + heads +
                                  "}; the causal path is not unique");
      }
      for (std::size_t u = 0; u < pool.units.size(); ++u) {
        bool kept = !pool.causal.empty() && pool.causal.front() == u;
        if (kept) {
          in_chain.set(pool.units[u].head);
          out.causal.push_back(pool.units[u].head);
        } else {
          for (auto v : pool.units[u].nodes) {
            alive.reset(v);
            out.spurious.push_back(v);
          }
        }
      }
    }

    // Drop whatever the chain built so far can no longer reach.
    if (!out.causal.empty()) {
      NodeSet reachable(n);
      for (auto c : out.causal) reachable |= g_.descendants(c);
      NodeSet orphaned = (alive - in_chain) - reachable;
      for (auto v = orphaned.find_first(); v != NodeSet::npos; v = orphaned.find_next(v)) {
        alive.reset(v);
        out.spurious.push_back(v);
      }
    }
  }
  return out;
}

Engine::Outcome Engine::tagt(const std::vector<std::size_t>& candidates) {
  std::vector<std::size_t> pool = candidates;
  std::shuffle(pool.begin(), pool.end(), rng_);
  Outcome out;
  std::optional<std::size_t> left = opt_.defectives;

  auto test = [&](const std::vector<std::size_t>& group) {
    auto runs = intervene(group, "tagt");
    bool stop = stopped(runs);
    if (!stop) rounds_.back().spurious = names(group);
    return stop;
  };
  auto drop = [&](const std::vector<std::size_t>& group) {
    for (auto v : group) {
      pool.erase(std::find(pool.begin(), pool.end(), v));
      out.spurious.push_back(v);
    }
  };

  while (!pool.empty()) {
    if (left) {
      if (*left == 0) {
        drop(std::vector<std::size_t>(pool));
        break;
      }
      if (*left >= pool.size()) {
        out.causal.insert(out.causal.end(), pool.begin(), pool.end());
        pool.clear();
        break;
      }
    } else if (!test(pool)) {
      drop(std::vector<std::size_t>(pool));
      break;
    }
    // `suspects` is known to contain a cause; halve it until one remains.
    std::vector<std::size_t> suspects = pool;
    while (suspects.size() > 1) {
      std::vector<std::size_t> half(suspects.begin(), suspects.begin() + static_cast<std::ptrdiff_t>((suspects.size() + 1) / 2));
      if (test(half)) {
        suspects = std::move(half);
      } else {
        drop(half);
        suspects.erase(suspects.begin(), suspects.begin() + static_cast<std::ptrdiff_t>(half.size()));
      }
    }
    auto found = suspects.front();
    pool.erase(std::find(pool.begin(), pool.end(), found));
    out.causal.push_back(found);
    if (left) --*left;
  }
  return out;
}

DiscoveryReport Engine::discover() {
  rounds_.clear();
  rng_ = make_rng(opt_.seed);

  std::vector<std::size_t> candidates;
  for (std::size_t v = 0; v < g_.size(); ++v)
    if (v != g_.failure() && !opt_.unsafe.count(g_.id(v))) candidates.push_back(v);

  Outcome result;
  switch (opt_.strategy) {
    case Strategy::TAGT:
      result = tagt(candidates);
      break;
    case Strategy::AID_P_B:
      result = giwp(candidates);
      break;
    case Strategy::AID:
    case Strategy::AID_P: {
      auto reduced = branch_prune();
      result = giwp(reduced.causal);
      result.spurious.insert(result.spurious.end(), reduced.spurious.begin(), reduced.spurious.end());
      break;
    }
  }

  DiscoveryReport report;
  report.strategy = opt_.strategy;
  report.seed = opt_.seed;
  report.repetitions = opt_.repetitions;
  auto causal = topological_sort(g_, result.causal, std::vector<std::uint64_t>(g_.size(), 0));
  for (auto v : causal) report.causal_path.push_back(g_.id(v));
  if (!report.causal_path.empty()) report.causal_path.push_back(g_.id(g_.failure()));
  for (auto v : result.spurious) report.spurious.insert(g_.id(v));
  report.rounds = rounds_;
  report.n_interventions = rounds_.size();
  return report;
}

DiscoveryReport causal_path_discovery(const AcmGraph& g, InterventionOracle& oracle, const EngineOptions& options) {
  Engine engine(g, oracle, options);
  return engine.discover();
}

}  // namespace aid
