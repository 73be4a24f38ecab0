#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <json.hpp>

#include "aid/predicate.hpp"
#include "aid/random.hpp"

namespace aid {

using NodeSet = boost::dynamic_bitset<>;

enum class Comparator { ByStartTime, ByEndTime };

struct PrecedenceRule {
  PredicateKind first = PredicateKind::Custom;
  PredicateKind second = PredicateKind::Custom;
  Comparator by = Comparator::ByStartTime;
};

enum class TemporalOrder { Before, After, Tie, Undetermined };

/// Decides which of two observation windows comes first. A rule for the kind
/// pair (in either order) wins; otherwise disjoint windows are ordered
/// directly and overlapping ones fall back to the default comparator, if any.
struct PrecedencePolicy {
  std::vector<PrecedenceRule> rules;
  std::optional<Comparator> default_comparator = Comparator::ByStartTime;

  TemporalOrder compare(PredicateKind ka, const TimeWindow& a, PredicateKind kb,
                        const TimeWindow& b) const;

  /// Slow-method pairs ordered by end time, everything else by start time.
  static PrecedencePolicy standard();
};

void to_json(nlohmann::json& j, const PrecedencePolicy& p);
void from_json(const nlohmann::json& j, PrecedencePolicy& p);

/// Approximate causal DAG over predicates plus the failure node F.
///
/// Edges are kept closed under transitivity (descendant/ancestor bitsets per
/// node); the transitive reduction, with explicit split/merge junction nodes,
/// is derived for display and for locating junctions.
class AcmGraph {
 public:
  struct Junction {
    std::string id;
    bool split = true;  // split: one input, several outputs; merge: the reverse
    std::vector<std::string> inputs;   // predicate or junction labels
    std::vector<std::string> outputs;
  };

  /// Reduced form with junctions: labels for predicates and junctions, and
  /// the edges between them.
  struct ReducedGraph {
    std::vector<std::string> labels;
    std::vector<bool> is_junction;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
  };

  AcmGraph() = default;

  /// Throws Error if the edges contain a cycle or mention unknown nodes.
  static AcmGraph from_edges(std::vector<PredicateId> nodes,
                             const std::vector<std::pair<PredicateId, PredicateId>>& edges,
                             const PredicateId& failure);

  std::size_t size() const { return ids_.size(); }
  const PredicateId& id(std::size_t i) const { return ids_[i]; }
  const std::vector<PredicateId>& ids() const { return ids_; }
  std::optional<std::size_t> find(const PredicateId& id) const;
  std::size_t index(const PredicateId& id) const;
  std::size_t failure() const { return failure_; }

  /// P ⤳ Q: a (non-empty) path from P to Q.
  bool reaches(std::size_t from, std::size_t to) const { return desc_[from].test(to); }
  const NodeSet& descendants(std::size_t i) const { return desc_[i]; }
  const NodeSet& ancestors(std::size_t i) const { return anc_[i]; }
  /// Longest-path depth from a source.
  std::size_t level(std::size_t i) const { return level_[i]; }
  const std::vector<std::size_t>& reduced_successors(std::size_t i) const { return tr_succ_[i]; }
  const std::vector<std::size_t>& reduced_predecessors(std::size_t i) const { return tr_pred_[i]; }
  std::size_t closure_edge_count() const;

  const std::vector<Junction>& junctions() const { return junctions_; }
  const Junction& junction(const std::string& id) const;
  ReducedGraph reduced_graph() const;

  std::vector<std::string>& diagnostics() { return diagnostics_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  nlohmann::json to_json() const;
  static AcmGraph from_json(const nlohmann::json& j);
  /// Graphviz rendering of the reduced form (transitive edges omitted).
  std::string to_dot() const;

 private:
  void finalize(const std::vector<std::vector<std::size_t>>& succ);

  std::vector<PredicateId> ids_;
  std::unordered_map<PredicateId, std::size_t> index_;
  std::size_t failure_ = 0;
  std::vector<NodeSet> desc_;
  std::vector<NodeSet> anc_;
  std::vector<std::size_t> level_;
  std::vector<std::vector<std::size_t>> tr_succ_;
  std::vector<std::vector<std::size_t>> tr_pred_;
  std::vector<Junction> junctions_;
  std::vector<std::string> diagnostics_;
};

/// Builds the ACM from failed runs. Predicates not observed in every failed
/// run are excluded; an edge P→Q is kept iff P precedes Q in every failed run.
AcmGraph build_acm(const std::set<PredicateId>& selected, const std::vector<ExecutionRun>& runs,
                   const PrecedencePolicy& policy, const PredicateId& failure,
                   const PredicateCatalog& catalog = {});

/// A junction child and its exclusive descendants, intervened on as one.
struct Branch {
  std::size_t head = 0;
  std::vector<std::size_t> members;  // sorted, includes head
};

/// One branch per head: the head plus every node in `scope` it reaches that
/// no other head reaches.
std::vector<Branch> branches_for(const AcmGraph& g, const std::vector<std::size_t>& heads,
                                 const NodeSet& scope);

/// Branches below a split junction of the reduced graph.
std::vector<Branch> branches_at(const AcmGraph& g, const std::string& junction_id);

/// Orders candidates by topological level, ties by the supplied keys.
std::vector<std::size_t> topological_sort(const AcmGraph& g, std::vector<std::size_t> candidates,
                                          const std::vector<std::uint64_t>& tie_keys);

/// Splits candidates into the first ceil(n/2) and the rest in topological
/// order; equal levels are ordered by draws from `rng`.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> topological_halves(
    const AcmGraph& g, const std::vector<std::size_t>& candidates, Rng& rng);

}  // namespace aid
