#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aid/predicate.hpp"

namespace aid {

/// Reference behavior of one method, taken over successful runs only.
struct MethodBaseline {
  Nanos min_duration = 0;
  Nanos max_duration = 0;
  std::set<std::string> return_values;  // distinct values seen
  bool missing_return = false;          // some successful call returned nothing

  /// The correct value x, when every successful call returned the same one.
  std::optional<std::string> unique_return() const {
    if (missing_return || return_values.size() != 1) return std::nullopt;
    return *return_values.begin();
  }
};

struct Baseline {
  std::map<std::string, MethodBaseline> methods;
};

using RunLabels = std::map<RunId, RunLabel>;
using Trace = std::vector<MethodEvent>;

/// Splits a flat event stream into per-run traces (ordered by run id, events
/// in input order).
std::vector<Trace> group_by_run(const std::vector<MethodEvent>& events);

Baseline compute_baseline(const std::vector<Trace>& traces, const RunLabels& labels);

struct ExtractionOptions {
  /// Methods a developer marked as free of side effects. Return-value and
  /// exception interventions are only safe on these. nullopt: all methods.
  std::optional<std::set<std::string>> state_preserving_methods;
  /// Record the failure predicate F in every failed run, at the run's end.
  bool add_failure_predicate = true;
};

struct Extraction {
  std::vector<Predicate> predicates;  // sorted by id
  std::vector<ExecutionRun> runs;     // one per trace, same order
  std::vector<std::string> warnings;
};

/// Evaluates the predicate catalog (data race, method fails, too fast, too
/// slow, wrong return) over every trace. Deterministic in its inputs.
Extraction extract_predicates(const std::vector<Trace>& traces, const RunLabels& labels,
                              const Baseline& baseline, const ExtractionOptions& options = {});

/// A conjunction holds iff every conjunct was observed. Its window starts at
/// the latest conjunct start and ends at the latest conjunct end.
std::optional<TimeWindow> evaluate_compound(const std::vector<PredicateId>& conjuncts,
                                            const ExecutionRun& run);

/// Adds observations of `compound` to every run where it holds.
void apply_compound(const Predicate& compound, std::vector<ExecutionRun>& runs);

}  // namespace aid
