#include "aid/target_oracle.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

#include "aid/error.hpp"
#include "aid/random.hpp"

namespace aid {

namespace {

constexpr Nanos kSlot = 100;
constexpr Nanos kWidth = 60;

std::string_view role_name(ModelRole r) {
  switch (r) {
    case ModelRole::Causal: return "causal";
    case ModelRole::Correlated: return "correlated";
    case ModelRole::Noise: return "noise";
  }
  return "noise";
}

ModelRole parse_role(const std::string& s) {
  if (s == "causal") return ModelRole::Causal;
  if (s == "correlated") return ModelRole::Correlated;
  if (s == "noise") return ModelRole::Noise;
  throw Error("unknown model role '" + s + "'");
}

}  // namespace

/// Index-based form of a model, shared by all runs of one simulate() call.
struct detail::CompiledModel {
  std::vector<PredicateId> ids;
  std::unordered_map<PredicateId, std::size_t> index;
  std::vector<ModelRole> role;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<double> probability;
  std::vector<std::size_t> firing_order;  // parents before children
  std::vector<std::vector<std::size_t>> temporal_succ;
  std::vector<std::size_t> temporal_indeg;
  std::vector<std::size_t> scheduled;     // non-noise nodes
  std::size_t last_causal = 0;
  PredicateId failure;

  explicit CompiledModel(const GroundTruthModel& m) : failure(m.failure) {
    m.validate();
    for (const auto& p : m.predicates) {
      index.emplace(p.id, ids.size());
      ids.push_back(p.id);
      role.push_back(p.role);
      probability.push_back(p.probability);
    }
    parent.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (m.predicates[i].parent) parent[i] = index.at(*m.predicates[i].parent);

    std::vector<int> depth(ids.size(), -1);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::size_t d = 0;
      for (auto p = parent[i]; p; p = parent[*p]) ++d;
      depth[i] = static_cast<int>(d);
    }
    firing_order.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) firing_order[i] = i;
    std::stable_sort(firing_order.begin(), firing_order.end(),
                     [&](auto a, auto b) { return depth[a] < depth[b]; });

    temporal_succ.resize(ids.size());
    temporal_indeg.assign(ids.size(), 0);
    for (const auto& [a, b] : m.temporal_edges) {
      if (a == failure || b == failure) continue;
      auto u = index.at(a), v = index.at(b);
      temporal_succ[u].push_back(v);
      ++temporal_indeg[v];
    }
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (role[i] != ModelRole::Noise) scheduled.push_back(i);

    auto path = m.true_causal_path();
    last_causal = index.at(path[path.size() - 2]);
  }
};

namespace {

using detail::CompiledModel;

std::vector<ExecutionRun> run_compiled(const CompiledModel& cm, const std::set<PredicateId>& intervention,
                                       std::size_t n_runs, std::uint64_t seed,
                                       const std::string& run_prefix) {
  if (n_runs == 0) throw Error("simulate: n_runs must be positive");
  std::vector<char> blocked(cm.ids.size(), 0);
  for (const auto& id : intervention) {
    auto it = cm.index.find(id);
    if (it == cm.index.end()) throw Error("simulate: cannot intervene on unknown predicate " + id);
    blocked[it->second] = 1;
  }

  std::vector<ExecutionRun> runs;
  runs.reserve(n_runs);
  std::vector<char> fired(cm.ids.size());
  std::vector<Nanos> slot(cm.ids.size());
  std::vector<std::size_t> indeg, ready;
  for (std::size_t r = 0; r < n_runs; ++r) {
    auto rng = make_rng(derive_seed(seed, r));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (auto i : cm.firing_order) {
      bool on = false;
      switch (cm.role[i]) {
        case ModelRole::Noise: on = unit(rng) < cm.probability[i]; break;
        default: on = cm.parent[i] ? fired[*cm.parent[i]] != 0 : true; break;
      }
      fired[i] = on && !blocked[i];
    }

    // Random linear extension of the temporal order.
    indeg = cm.temporal_indeg;
    ready.clear();
    for (auto i : cm.scheduled)
      if (!indeg[i]) ready.push_back(i);
    Nanos position = 0;
    while (!ready.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
      auto k = pick(rng);
      auto u = ready[k];
      ready[k] = ready.back();
      ready.pop_back();
      slot[u] = position++;
      for (auto v : cm.temporal_succ[u])
        if (--indeg[v] == 0) ready.push_back(v);
    }
    Nanos horizon = position * kSlot;
    std::uniform_int_distribution<Nanos> anywhere(0, std::max<Nanos>(horizon - 1, 0));

    ExecutionRun run;
    run.run_id = run_prefix + std::to_string(r);
    for (std::size_t i = 0; i < cm.ids.size(); ++i) {
      Nanos start = cm.role[i] == ModelRole::Noise ? anywhere(rng) : slot[i] * kSlot;
      if (fired[i]) run.observations.emplace(cm.ids[i], TimeWindow{start, start + kWidth});
    }
    bool failure = fired[cm.last_causal] != 0;
    run.label = failure ? RunLabel::Failure : RunLabel::Success;
    if (failure) run.observations.emplace(cm.failure, TimeWindow{horizon + kSlot, horizon + kSlot});
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace

std::vector<PredicateId> GroundTruthModel::true_causal_path() const {
  std::vector<PredicateId> path;
  const ModelPredicate* root = nullptr;
  std::map<PredicateId, const ModelPredicate*> child_of;
  for (const auto& p : predicates) {
    if (p.role != ModelRole::Causal) continue;
    if (!p.parent) {
      if (root) throw Error("model has more than one root cause (" + root->id + ", " + p.id + ")");
      root = &p;
    } else if (!child_of.emplace(*p.parent, &p).second) {
      throw Error("model has two causal successors of " + *p.parent);
    }
  }
  if (!root) throw Error("model has no root cause");
  for (auto* cur = root; cur;) {
    path.push_back(cur->id);
    auto it = child_of.find(cur->id);
    cur = it == child_of.end() ? nullptr : it->second;
  }
  std::size_t n_causal = static_cast<std::size_t>(std::count_if(
      predicates.begin(), predicates.end(), [](const auto& p) { return p.role == ModelRole::Causal; }));
  if (path.size() != n_causal) throw Error("causal predicates do not form a single chain");
  path.push_back(failure);
  return path;
}

const ModelPredicate& GroundTruthModel::predicate(const PredicateId& id) const {
  for (const auto& p : predicates)
    if (p.id == id) return p;
  throw Error("model has no predicate " + id);
}

void GroundTruthModel::validate() const {
  std::map<PredicateId, const ModelPredicate*> by_id;
  for (const auto& p : predicates) {
    if (p.id == failure) throw Error("model lists the failure predicate " + failure + " as an ordinary predicate");
    if (!by_id.emplace(p.id, &p).second) throw Error("duplicate model predicate " + p.id);
  }
  for (const auto& p : predicates) {
    switch (p.role) {
      case ModelRole::Noise:
        if (p.parent) throw Error("noise predicate " + p.id + " must not have a parent");
        if (p.probability < 0.0 || p.probability > 1.0)
          throw Error("noise predicate " + p.id + " has probability outside [0,1]");
        break;
      case ModelRole::Correlated:
        if (!p.parent) throw Error("correlated predicate " + p.id + " needs a parent");
        [[fallthrough]];
      case ModelRole::Causal:
        if (p.parent) {
          auto it = by_id.find(*p.parent);
          if (it == by_id.end()) throw Error(p.id + " has unknown parent " + *p.parent);
          if (it->second->role == ModelRole::Noise) throw Error(p.id + " is anchored on noise predicate " + *p.parent);
          if (p.role == ModelRole::Causal && it->second->role != ModelRole::Causal)
            throw Error("causal predicate " + p.id + " has a non-causal parent");
        }
        break;
    }
    std::size_t steps = 0;
    for (auto q = p.parent; q; q = by_id.at(*q)->parent)
      if (++steps > predicates.size()) throw Error("parent links of " + p.id + " form a cycle");
  }
  for (const auto& [a, b] : temporal_edges) {
    for (const auto* id : {&a, &b}) {
      if (*id == failure) continue;
      auto it = by_id.find(*id);
      if (it == by_id.end()) throw Error("temporal edge mentions unknown predicate " + *id);
      if (it->second->role == ModelRole::Noise) throw Error("temporal edge mentions noise predicate " + *id);
    }
  }
  auto path = true_causal_path();
  auto acm = intended_acm(*this);
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (!acm.reaches(acm.index(path[i]), acm.index(path[i + 1])))
      throw Error("temporal order does not place " + path[i] + " before " + path[i + 1]);
}

AcmGraph intended_acm(const GroundTruthModel& model) {
  std::vector<PredicateId> nodes;
  for (const auto& p : model.predicates)
    if (p.role != ModelRole::Noise) nodes.push_back(p.id);
  std::vector<std::pair<PredicateId, PredicateId>> edges;
  for (const auto& e : model.temporal_edges) edges.push_back(e);
  for (const auto& id : nodes) edges.emplace_back(id, model.failure);
  nodes.push_back(model.failure);
  return AcmGraph::from_edges(std::move(nodes), edges, model.failure);
}

std::vector<ExecutionRun> simulate(const GroundTruthModel& model, const std::set<PredicateId>& intervention,
                                   std::size_t n_runs, std::uint64_t seed) {
  CompiledModel cm(model);
  return run_compiled(cm, intervention, n_runs, seed, "run-");
}

std::vector<ExecutionRun> sample_logs(const GroundTruthModel& model, std::size_t n_failed,
                                      std::size_t n_success, std::uint64_t seed) {
  CompiledModel cm(model);
  std::vector<ExecutionRun> out;
  if (n_failed) out = run_compiled(cm, {}, n_failed, derive_seed(seed, "failed"), "fail-");
  if (n_success) {
    auto root = model.true_causal_path().front();
    auto ok = run_compiled(cm, {root}, n_success, derive_seed(seed, "success"), "ok-");
    out.insert(out.end(), std::make_move_iterator(ok.begin()), std::make_move_iterator(ok.end()));
  }
  return out;
}

SimulatedOracle::SimulatedOracle(GroundTruthModel model)
    : model_(std::move(model)), compiled_(std::make_shared<const CompiledModel>(model_)) {}

std::vector<ExecutionRun> SimulatedOracle::intervene(const std::vector<PredicateId>& predicates,
                                                     std::size_t repetitions) {
  std::set<PredicateId> group(predicates.begin(), predicates.end());
  std::string key;
  for (const auto& id : group) key += id + '\n';
  return run_compiled(*compiled_, group, repetitions, derive_seed(model_.seed, key), "run-");
}

void to_json(nlohmann::json& j, const GroundTruthModel& m) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : m.predicates) {
    nlohmann::json e = {{"id", p.id}, {"role", role_name(p.role)}, {"kind", to_string(p.kind)}};
    e["parent"] = p.parent ? nlohmann::json(*p.parent) : nlohmann::json(nullptr);
    if (p.role == ModelRole::Noise) e["probability"] = p.probability;
    preds.push_back(std::move(e));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : m.temporal_edges) edges.push_back({a, b});
  j = {{"failure", m.failure}, {"seed", m.seed}, {"predicates", preds}, {"temporal_edges", edges}};
}

void from_json(const nlohmann::json& j, GroundTruthModel& m) {
  m.failure = j.value("failure", std::string(kFailureId));
  m.seed = j.value("seed", std::uint64_t{0});
  m.predicates.clear();
  for (const auto& e : j.at("predicates")) {
    ModelPredicate p;
    p.id = e.at("id").get<std::string>();
    p.role = parse_role(e.at("role").get<std::string>());
    if (auto it = e.find("parent"); it != e.end() && !it->is_null()) p.parent = it->get<std::string>();
    p.probability = e.value("probability", 1.0);
    p.kind = parse_predicate_kind(e.value("kind", std::string("Custom")));
    m.predicates.push_back(std::move(p));
  }
  m.temporal_edges.clear();
  for (const auto& e : j.value("temporal_edges", nlohmann::json::array()))
    m.temporal_edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
}

Fixture golden_fixture_figure3() {
  GroundTruthModel m;
  m.seed = 3;
  auto causal = [&](std::string id, std::optional<std::string> parent) {
    m.predicates.push_back({std::move(id), ModelRole::Causal, std::move(parent), 1.0, PredicateKind::Custom});
  };
  auto effect = [&](std::string id, std::string parent) {
    m.predicates.push_back({std::move(id), ModelRole::Correlated, std::move(parent), 1.0, PredicateKind::Custom});
  };
  causal("P1", std::nullopt);
  causal("P2", "P1");
  effect("P3", "P2");
  effect("P4", "P3");
  effect("P5", "P4");
  effect("P6", "P5");
  effect("P7", "P1");
  effect("P8", "P7");
  effect("P9", "P8");
  effect("P10", "P3");
  causal("P11", "P2");
  // Two predicates that show up in successful runs too; statistical filtering drops them.
  m.predicates.push_back({"N1", ModelRole::Noise, std::nullopt, 0.5, PredicateKind::Custom});
  m.predicates.push_back({"N2", ModelRole::Noise, std::nullopt, 0.25, PredicateKind::Custom});

  // P10 is placed after both P6 and P11: it is a common descendant of the two
  // branches below P3, which keeps it out of both of them.
  m.temporal_edges = {
      {"P1", "P2"}, {"P2", "P3"},  {"P3", "P4"},   {"P4", "P5"}, {"P5", "P6"},
      {"P6", "P10"}, {"P3", "P7"}, {"P7", "P8"},   {"P8", "P9"}, {"P7", "P11"},
      {"P11", "P10"}, {"P9", "F"}, {"P10", "F"},
  };
  Fixture f{m, intended_acm(m)};
  return f;
}

}  // namespace aid
