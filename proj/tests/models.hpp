#pragma once

#include <string>
#include <vector>

#include "aid/target_oracle.hpp"

namespace aid::testing {

inline std::string P(std::size_t i) { return "P" + std::to_string(i); }

/// P1 → … → Pn → F with the first d predicates causal; the rest trail their
/// predecessor.
inline GroundTruthModel chain_model(std::size_t n, std::size_t d, std::uint64_t seed = 1) {
  GroundTruthModel m;
  m.seed = seed;
  for (std::size_t i = 1; i <= n; ++i) {
    std::optional<PredicateId> parent;
    if (i > 1) parent = P(i - 1);
    m.predicates.push_back({P(i), i <= d ? ModelRole::Causal : ModelRole::Correlated, parent, 1.0,
                            PredicateKind::Custom});
    if (i > 1) m.temporal_edges.emplace_back(P(i - 1), P(i));
  }
  m.temporal_edges.emplace_back(P(n), "F");
  return m;
}

/// A causal chain P1..Pd plus n−d effects of P1 with no mutual order.
inline GroundTruthModel independent_model(std::size_t n, std::size_t d, std::uint64_t seed = 1) {
  GroundTruthModel m;
  m.seed = seed;
  for (std::size_t i = 1; i <= n; ++i) {
    bool causal = i <= d;
    std::optional<PredicateId> parent;
    if (i > 1) parent = causal ? P(i - 1) : P(1);
    m.predicates.push_back({P(i), causal ? ModelRole::Causal : ModelRole::Correlated, parent, 1.0,
                            PredicateKind::Custom});
    if (causal && i > 1) m.temporal_edges.emplace_back(P(i - 1), P(i));
    if (!causal || i == d) m.temporal_edges.emplace_back(P(i), "F");
  }
  return m;
}

}  // namespace aid::testing
