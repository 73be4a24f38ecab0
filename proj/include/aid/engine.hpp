#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aid/acm.hpp"
#include "aid/oracle.hpp"
#include "aid/predicate.hpp"

namespace aid {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Strategy { AID, AID_P, AID_P_B, TAGT };

std::string_view to_string(Strategy s);
/// Accepts "aid", "aid-p", "aid-p-b", "tagt" (case-insensitive, '_' for '-').
Strategy parse_strategy(std::string_view s);

/// One intervention and what was concluded from it.
struct RoundRecord {
  std::size_t step = 0;  // 1-based
  std::string phase;     // "branch", "chain" or "tagt"
  std::vector<PredicateId> intervened;
  std::size_t repetitions = 0;
  std::size_t failing_runs = 0;
  bool failure_stopped = false;
  std::vector<PredicateId> confirmed;  // newly marked causal (or branch kept)
  std::vector<PredicateId> spurious;   // the intervened group, when failure persisted
  std::vector<PredicateId> pruned;     // other predicates removed by counterfactual violation
};

struct DiscoveryReport {
  std::vector<PredicateId> causal_path;  // topological order, ends at F when non-empty
  std::set<PredicateId> spurious;
  std::vector<RoundRecord> rounds;
  std::size_t n_interventions = 0;
  Strategy strategy = Strategy::AID;
  std::uint64_t seed = 0;
  std::size_t repetitions = 1;
  std::string version{kVersion};

  bool found() const { return !causal_path.empty(); }
};

void to_json(nlohmann::json& j, const RoundRecord& r);
void to_json(nlohmann::json& j, const DiscoveryReport& r);
void from_json(const nlohmann::json& j, DiscoveryReport& r);

struct EngineOptions {
  Strategy strategy = Strategy::AID;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  /// Predicates that must never be intervened on.
  std::set<PredicateId> unsafe;
  /// Number of causal predicates, for TAGT only. Unknown means TAGT first
  /// checks whether the remaining pool still contains a cause.
  std::optional<std::size_t> defectives;
};

/// A unit of intervention: a single predicate, or a branch intervened on as a
/// whole. `head` orders units topologically.
struct InterventionUnit {
  std::size_t head = 0;
  std::vector<std::size_t> nodes;
};

/// The removal rule for one round: the units in `others` that do not reach any
/// intervened node and whose presence disagrees with the failure in some run.
/// Returns indices into `others`.
std::vector<std::size_t> interventional_prune(const std::vector<ExecutionRun>& runs,
                                              const std::vector<std::size_t>& intervened,
                                              const std::vector<InterventionUnit>& others,
                                              const AcmGraph& g);

/// Stateful driver for one discovery session: owns the oracle connection,
/// the seeded tie-breaking stream and the round log.
class Engine {
 public:
  Engine(const AcmGraph& g, InterventionOracle& oracle, EngineOptions options);

  struct Outcome {
    std::vector<std::size_t> causal;
    std::vector<std::size_t> spurious;
  };

  /// Group intervention with pruning over single predicates.
  Outcome giwp(const std::vector<std::size_t>& candidates, const std::string& phase = "chain");

  /// Reduces the graph to a chain by resolving every junction. Returns the
  /// surviving chain in topological order and the predicates removed.
  Outcome branch_prune();

  /// Binary splitting over a random order, ignoring the graph.
  Outcome tagt(const std::vector<std::size_t>& candidates);

  DiscoveryReport discover();

  const std::vector<RoundRecord>& rounds() const { return rounds_; }

 private:
  struct Pool;

  std::vector<ExecutionRun> intervene(const std::vector<std::size_t>& nodes, const std::string& phase);
  bool stopped(const std::vector<ExecutionRun>& runs) const;
  void giwp_rec(Pool& pool, std::vector<std::size_t> members, bool known_positive);
  std::vector<std::size_t> order_units(const Pool& pool, std::vector<std::size_t> members);
  std::vector<PredicateId> names(const std::vector<std::size_t>& nodes) const;

  const AcmGraph& g_;
  InterventionOracle& oracle_;
  EngineOptions opt_;
  Rng rng_;
  std::vector<RoundRecord> rounds_;
};

/// One-call form: branch-prune (unless disabled) then GIWP, or TAGT.
DiscoveryReport causal_path_discovery(const AcmGraph& g, InterventionOracle& oracle,
                                      const EngineOptions& options);

}  // namespace aid
