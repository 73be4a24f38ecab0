#include "aid/acm.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include "aid/error.hpp"

namespace aid {

namespace {

TemporalOrder by(Comparator c, const TimeWindow& a, const TimeWindow& b) {
  auto x = c == Comparator::ByStartTime ? a.start : a.end;
  auto y = c == Comparator::ByStartTime ? b.start : b.end;
  if (x < y) return TemporalOrder::Before;
  if (y < x) return TemporalOrder::After;
  return TemporalOrder::Tie;
}

std::string_view comparator_name(Comparator c) {
  return c == Comparator::ByStartTime ? "start" : "end";
}

Comparator parse_comparator(const std::string& s) {
  if (s == "start") return Comparator::ByStartTime;
  if (s == "end") return Comparator::ByEndTime;
  throw Error("unknown comparator '" + s + "' (expected start|end)");
}

/// Finds an edge lying on a cycle of the relation, if there is one.
std::optional<std::pair<std::size_t, std::size_t>> find_cycle_edge(
    const std::vector<std::vector<std::size_t>>& succ) {
  std::size_t n = succ.size();
  std::vector<int> color(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root]) continue;
    stack.emplace_back(root, 0);
    color[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < succ[u].size()) {
        auto v = succ[u][next++];
        if (color[v] == 1) return std::make_pair(u, v);
        if (color[v] == 0) {
          color[v] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        color[u] = 2;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

}  // namespace

TemporalOrder PrecedencePolicy::compare(PredicateKind ka, const TimeWindow& a, PredicateKind kb,
                                        const TimeWindow& b) const {
  for (const auto& r : rules) {
    if ((r.first == ka && r.second == kb) || (r.first == kb && r.second == ka))
      return by(r.by, a, b);
  }
  bool a_first = a.end <= b.start;
  bool b_first = b.end <= a.start;
  if (a_first && b_first) return TemporalOrder::Tie;
  if (a_first) return TemporalOrder::Before;
  if (b_first) return TemporalOrder::After;
  if (default_comparator) return by(*default_comparator, a, b);
  return TemporalOrder::Undetermined;
}

PrecedencePolicy PrecedencePolicy::standard() {
  PrecedencePolicy p;
  p.rules.push_back({PredicateKind::TooSlow, PredicateKind::TooSlow, Comparator::ByEndTime});
  p.default_comparator = Comparator::ByStartTime;
  return p;
}

void to_json(nlohmann::json& j, const PrecedencePolicy& p) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : p.rules)
    rules.push_back({{"kinds", {to_string(r.first), to_string(r.second)}}, {"by", comparator_name(r.by)}});
  j = {{"rules", rules}};
  j["default"] = p.default_comparator ? nlohmann::json(comparator_name(*p.default_comparator))
                                      : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, PrecedencePolicy& p) {
  p.rules.clear();
  for (const auto& r : j.value("rules", nlohmann::json::array())) {
    const auto& kinds = r.at("kinds");
    if (!kinds.is_array() || kinds.size() != 2) throw Error("policy rule needs two kinds");
    p.rules.push_back({parse_predicate_kind(kinds[0].get<std::string>()),
                       parse_predicate_kind(kinds[1].get<std::string>()),
                       parse_comparator(r.at("by").get<std::string>())});
  }
  auto d = j.find("default");
  if (d == j.end()) p.default_comparator = Comparator::ByStartTime;
  else if (d->is_null()) p.default_comparator.reset();
  else p.default_comparator = parse_comparator(d->get<std::string>());
}

// ---------------------------------------------------------------------------
// AcmGraph

AcmGraph AcmGraph::from_edges(std::vector<PredicateId> nodes,
                              const std::vector<std::pair<PredicateId, PredicateId>>& edges,
                              const PredicateId& failure) {
  AcmGraph g;
  g.ids_ = std::move(nodes);
  for (std::size_t i = 0; i < g.ids_.size(); ++i) {
    if (!g.index_.emplace(g.ids_[i], i).second) throw Error("duplicate ACM node " + g.ids_[i]);
  }
  g.failure_ = g.index(failure);
  std::vector<std::vector<std::size_t>> succ(g.size());
  for (const auto& [a, b] : edges) {
    auto u = g.index(a), v = g.index(b);
    if (u == v) throw Error("self edge on " + a);
    succ[u].push_back(v);
  }
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  if (auto cyc = find_cycle_edge(succ))
    throw Error("ACM edges contain a cycle through " + g.ids_[cyc->first] + " -> " + g.ids_[cyc->second]);
  g.finalize(succ);
  return g;
}

void AcmGraph::finalize(const std::vector<std::vector<std::size_t>>& succ) {
  std::size_t n = size();
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& s : succ)
    for (auto v : s) ++indeg[v];
  std::vector<std::size_t> order;
  order.reserve(n);
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (!indeg[i]) ready.push(i);
  while (!ready.empty()) {
    auto u = ready.front();
    ready.pop();
    order.push_back(u);
    for (auto v : succ[u])
      if (--indeg[v] == 0) ready.push(v);
  }

  desc_.assign(n, NodeSet(n));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (auto v : succ[*it]) {
      desc_[*it].set(v);
      desc_[*it] |= desc_[v];
    }
  }
  anc_.assign(n, NodeSet(n));
  for (std::size_t u = 0; u < n; ++u)
    for (auto v = desc_[u].find_first(); v != NodeSet::npos; v = desc_[u].find_next(v)) anc_[v].set(u);

  level_.assign(n, 0);
  for (auto u : order)
    for (auto v : succ[u]) level_[v] = std::max(level_[v], level_[u] + 1);

  tr_succ_.assign(n, {});
  tr_pred_.assign(n, {});
  for (std::size_t u = 0; u < n; ++u) {
    NodeSet implied(n);
    for (auto w = desc_[u].find_first(); w != NodeSet::npos; w = desc_[u].find_next(w)) implied |= desc_[w];
    NodeSet direct = desc_[u] - implied;
    for (auto v = direct.find_first(); v != NodeSet::npos; v = direct.find_next(v)) {
      tr_succ_[u].push_back(v);
      tr_pred_[v].push_back(u);
    }
  }

  junctions_.clear();
  for (std::size_t u = 0; u < n; ++u) {
    if (tr_succ_[u].size() > 1) {
      Junction j{"J" + std::to_string(junctions_.size()), true, {ids_[u]}, {}};
      for (auto v : tr_succ_[u]) j.outputs.push_back(ids_[v]);
      junctions_.push_back(std::move(j));
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (tr_pred_[v].size() > 1) {
      Junction j{"J" + std::to_string(junctions_.size()), false, {}, {ids_[v]}};
      for (auto u : tr_pred_[v]) j.inputs.push_back(ids_[u]);
      junctions_.push_back(std::move(j));
    }
  }
}

std::optional<std::size_t> AcmGraph::find(const PredicateId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AcmGraph::index(const PredicateId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("predicate " + id + " is not in the ACM");
  return it->second;
}

std::size_t AcmGraph::closure_edge_count() const {
  std::size_t total = 0;
  for (const auto& d : desc_) total += d.count();
  return total;
}

const AcmGraph::Junction& AcmGraph::junction(const std::string& id) const {
  for (const auto& j : junctions_)
    if (j.id == id) return j;
  throw Error(id + " is not a junction of the ACM");
}

AcmGraph::ReducedGraph AcmGraph::reduced_graph() const {
  ReducedGraph r;
  std::size_t n = size();
  r.labels = ids_;
  r.is_junction.assign(n, false);
  std::vector<std::optional<std::size_t>> split_of(n), merge_of(n);
  for (const auto& j : junctions_) {
    auto node = r.labels.size();
    r.labels.push_back(j.id);
    r.is_junction.push_back(true);
    if (j.split) split_of[index(j.inputs.front())] = node;
    else merge_of[index(j.outputs.front())] = node;
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (split_of[u]) r.edges.emplace_back(u, *split_of[u]);
    if (merge_of[u]) r.edges.emplace_back(*merge_of[u], u);
    for (auto v : tr_succ_[u]) {
      auto src = split_of[u].value_or(u);
      auto dst = merge_of[v].value_or(v);
      r.edges.emplace_back(src, dst);
    }
  }
  return r;
}

nlohmann::json AcmGraph::to_json() const {
  nlohmann::json j;
  j["failure"] = ids_.empty() ? nlohmann::json(nullptr) : nlohmann::json(ids_[failure_]);
  j["nodes"] = ids_;
  nlohmann::json levels = nlohmann::json::object();
  nlohmann::json closure = nlohmann::json::object();
  nlohmann::json reduced = nlohmann::json::array();
  for (std::size_t u = 0; u < size(); ++u) {
    levels[ids_[u]] = level_[u];
    nlohmann::json d = nlohmann::json::array();
    for (auto v = desc_[u].find_first(); v != NodeSet::npos; v = desc_[u].find_next(v)) d.push_back(ids_[v]);
    closure[ids_[u]] = d;
    for (auto v : tr_succ_[u]) reduced.push_back({ids_[u], ids_[v]});
  }
  j["levels"] = levels;
  j["reduced_edges"] = reduced;
  j["closure"] = closure;
  nlohmann::json junctions = nlohmann::json::array();
  for (const auto& jn : junctions_)
    junctions.push_back({{"id", jn.id}, {"kind", jn.split ? "split" : "merge"},
                         {"inputs", jn.inputs}, {"outputs", jn.outputs}});
  j["junctions"] = junctions;
  j["diagnostics"] = diagnostics_;
  return j;
}

AcmGraph AcmGraph::from_json(const nlohmann::json& j) {
  auto nodes = j.at("nodes").get<std::vector<PredicateId>>();
  std::vector<std::pair<PredicateId, PredicateId>> edges;
  if (auto c = j.find("closure"); c != j.end()) {
    for (const auto& [from, tos] : c->items())
      for (const auto& to : tos) edges.emplace_back(from, to.get<std::string>());
  } else {
    for (const auto& e : j.at("reduced_edges")) edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
  }
  auto g = from_edges(std::move(nodes), edges, j.at("failure").get<std::string>());
  g.diagnostics_ = j.value("diagnostics", std::vector<std::string>{});
  return g;
}

std::string AcmGraph::to_dot() const {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  auto r = reduced_graph();
  std::string out = "digraph acm {\n  rankdir=TB;\n";
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    out += "  " + quote(r.labels[i]);
    if (r.is_junction[i]) out += " [shape=circle,label=\"\",width=0.15]";
    else if (i == failure_) out += " [shape=doublecircle]";
    else out += " [shape=box]";
    out += ";\n";
  }
  for (const auto& [a, b] : r.edges) out += "  " + quote(r.labels[a]) + " -> " + quote(r.labels[b]) + ";\n";
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------

AcmGraph build_acm(const std::set<PredicateId>& selected, const std::vector<ExecutionRun>& runs,
                   const PrecedencePolicy& policy, const PredicateId& failure,
                   const PredicateCatalog& catalog) {
  if (selected.empty()) throw Error("build_acm: no predicates selected");
  std::vector<const ExecutionRun*> failed;
  for (const auto& r : runs)
    if (r.failed()) failed.push_back(&r);
  if (failed.empty()) throw Error("build_acm: no failed runs");
  std::sort(failed.begin(), failed.end(), [](auto* a, auto* b) { return a->run_id < b->run_id; });

  std::vector<std::string> diagnostics;
  std::vector<PredicateId> nodes;
  for (const auto& id : selected) {
    bool everywhere = std::all_of(failed.begin(), failed.end(), [&](auto* r) { return r->observed(id); });
    if (everywhere) nodes.push_back(id);
    else diagnostics.push_back("excluded " + id + ": not observed in every failed run");
  }
  if (std::find(nodes.begin(), nodes.end(), failure) == nodes.end())
    throw Error("build_acm: failure predicate " + failure + " is not observed in every failed run");

  std::size_t n = nodes.size();
  std::vector<PredicateKind> kinds(n, PredicateKind::Custom);
  for (std::size_t i = 0; i < n; ++i)
    if (auto it = catalog.find(nodes[i]); it != catalog.end()) kinds[i] = it->second.kind;

  std::vector<NodeSet> edge(n, NodeSet(n));
  for (auto& e : edge) e.set();
  for (std::size_t i = 0; i < n; ++i) edge[i].reset(i);
  std::set<std::pair<std::size_t, std::size_t>> undetermined;

  std::vector<TimeWindow> w(n);
  for (const auto* run : failed) {
    for (std::size_t i = 0; i < n; ++i) w[i] = run->observations.at(nodes[i]);
    std::vector<std::vector<std::size_t>> before(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        switch (policy.compare(kinds[a], w[a], kinds[b], w[b])) {
          case TemporalOrder::Before:
            before[a].push_back(b);
            edge[b].reset(a);
            break;
          case TemporalOrder::After:
            before[b].push_back(a);
            edge[a].reset(b);
            break;
          case TemporalOrder::Undetermined:
            undetermined.emplace(a, b);
            [[fallthrough]];
          case TemporalOrder::Tie:
            edge[a].reset(b);
            edge[b].reset(a);
            break;
        }
      }
    }
    if (auto cyc = find_cycle_edge(before))
      throw Error("precedence policy is cyclic in run " + run->run_id + " (involving " +
                  nodes[cyc->first] + " and " + nodes[cyc->second] + ")");
  }
  for (auto [a, b] : undetermined)
    diagnostics.push_back("no precedence rule for overlapping " + nodes[a] + " and " + nodes[b]);

  std::vector<std::pair<PredicateId, PredicateId>> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (auto b = edge[a].find_first(); b != NodeSet::npos; b = edge[a].find_next(b))
      edges.emplace_back(nodes[a], nodes[b]);
  auto g = AcmGraph::from_edges(std::move(nodes), edges, failure);
  g.diagnostics() = std::move(diagnostics);
  return g;
}

std::vector<Branch> branches_for(const AcmGraph& g, const std::vector<std::size_t>& heads,
                                 const NodeSet& scope) {
  std::vector<Branch> out;
  out.reserve(heads.size());
  for (auto h : heads) {
    NodeSet mine = g.descendants(h) & scope;
    for (auto other : heads) {
      if (other == h) continue;
      mine -= g.descendants(other);
      mine.reset(other);
    }
    mine.set(h);
    Branch b{h, {}};
    for (auto v = mine.find_first(); v != NodeSet::npos; v = mine.find_next(v)) b.members.push_back(v);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Branch> branches_at(const AcmGraph& g, const std::string& junction_id) {
  const auto& j = g.junction(junction_id);
  if (!j.split || j.outputs.size() < 2)
    throw Error(junction_id + " is not a split junction with at least two children");
  std::vector<std::size_t> heads;
  for (const auto& id : j.outputs) heads.push_back(g.index(id));
  NodeSet scope(g.size());
  scope.set();
  return branches_for(g, heads, scope);
}

std::vector<std::size_t> topological_sort(const AcmGraph& g, std::vector<std::size_t> candidates,
                                          const std::vector<std::uint64_t>& tie_keys) {
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (g.level(a) != g.level(b)) return g.level(a) < g.level(b);
    if (tie_keys[a] != tie_keys[b]) return tie_keys[a] < tie_keys[b];
    return a < b;
  });
  return candidates;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> topological_halves(
    const AcmGraph& g, const std::vector<std::size_t>& candidates, Rng& rng) {
  std::vector<std::uint64_t> keys(g.size(), 0);
  for (auto c : candidates) keys[c] = rng();
  auto ordered = topological_sort(g, candidates, keys);
  auto half = (ordered.size() + 1) / 2;
  std::vector<std::size_t> first(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<std::size_t> second(ordered.begin() + static_cast<std::ptrdiff_t>(half), ordered.end());
  return {std::move(first), std::move(second)};
}

}  // namespace aid
