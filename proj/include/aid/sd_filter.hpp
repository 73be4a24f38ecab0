#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aid/predicate.hpp"

namespace aid {

struct PredicateStats {
  PredicateId pred_id;
  std::size_t n_failed_with = 0;
  std::size_t n_success_with = 0;
  std::size_t n_failed_total = 0;

  /// #failed runs where P holds / #runs where P holds
  double precision() const;
  /// #failed runs where P holds / #failed runs
  double recall() const;
  /// Exact 100% precision and 100% recall, decided on counts.
  bool fully_discriminative() const {
    return n_success_with == 0 && n_failed_with == n_failed_total && n_failed_total > 0;
  }
};

using StatsTable = std::map<PredicateId, PredicateStats>;

/// Precision/recall for every predicate seen in any run. Throws when no run failed.
StatsTable compute_stats(const std::vector<ExecutionRun>& runs);

/// Predicates with precision = recall = 1 that are safe to intervene on.
/// Predicates absent from the catalog are treated as safe.
std::set<PredicateId> fully_discriminative(const StatsTable& stats, const PredicateCatalog& catalog);

/// CSV rendering: pred_id,n_failed_with,n_success_with,n_failed_total,precision,recall,selected
std::string stats_csv(const StatsTable& stats, const std::set<PredicateId>& selected);

}  // namespace aid
