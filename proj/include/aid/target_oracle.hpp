#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aid/acm.hpp"
#include "aid/oracle.hpp"
#include "aid/predicate.hpp"

namespace aid {

enum class ModelRole {
  Causal,      // on the true causal path
  Correlated,  // fires iff its parent fires; never causes F
  Noise,       // fires independently with `probability`
};

struct ModelPredicate {
  PredicateId id;
  ModelRole role = ModelRole::Noise;
  std::optional<PredicateId> parent;  // causal: previous path member (none for the root)
  double probability = 1.0;           // noise only
  PredicateKind kind = PredicateKind::Custom;
};

/// Hidden ground truth for a simulated application: one root cause, a unique
/// causal chain ending at F, effect-only predicates hanging off it, and noise.
struct GroundTruthModel {
  PredicateId failure{kFailureId};
  std::vector<ModelPredicate> predicates;  // excludes F
  /// Intended temporal precedence among non-noise predicates (and F). The
  /// simulator schedules every run as a random linear extension of it.
  std::vector<std::pair<PredicateId, PredicateId>> temporal_edges;
  std::uint64_t seed = 0;

  /// Root cause first, F last.
  std::vector<PredicateId> true_causal_path() const;
  const ModelPredicate& predicate(const PredicateId& id) const;
  /// Throws Error when the single-root / unique-path structure is broken.
  void validate() const;
};

void to_json(nlohmann::json& j, const GroundTruthModel& m);
void from_json(const nlohmann::json& j, GroundTruthModel& m);

/// Executes `n_runs` runs with every predicate in `intervention` suppressed.
/// Pure in (model, intervention, n_runs, seed).
std::vector<ExecutionRun> simulate(const GroundTruthModel& model, const std::set<PredicateId>& intervention,
                                   std::size_t n_runs, std::uint64_t seed);

/// Unintervened observation logs: `n_failed` failing runs and `n_success`
/// runs in which the root cause did not trigger.
std::vector<ExecutionRun> sample_logs(const GroundTruthModel& model, std::size_t n_failed,
                                      std::size_t n_success, std::uint64_t seed);

/// The ACM the temporal model implies (non-noise predicates plus F).
AcmGraph intended_acm(const GroundTruthModel& model);

namespace detail {
struct CompiledModel;
}

/// Oracle backed by a model. Each request is simulated with a seed derived
/// from the model seed and the (sorted) intervention set.
class SimulatedOracle : public InterventionOracle {
 public:
  explicit SimulatedOracle(GroundTruthModel model);
  std::vector<ExecutionRun> intervene(const std::vector<PredicateId>& predicates,
                                      std::size_t repetitions) override;
  const GroundTruthModel& model() const { return model_; }

 private:
  GroundTruthModel model_;
  std::shared_ptr<const detail::CompiledModel> compiled_;
};

/// Engine seed under which the walkthrough order is reproduced: {P4,P5,P6}
/// is tried first below P3 and {P8,P9} first below P7.
inline constexpr std::uint64_t kFigure3Seed = 3;

struct Fixture {
  GroundTruthModel model;
  AcmGraph acm;
};

/// The eleven-predicate walkthrough: chain P1→P2→P3, a junction after P3 into
/// {P4,P5,P6} and {P7,...}, a junction after P7 into {P8,P9} and {P11,P10},
/// true path P1→P2→P11→F.
Fixture golden_fixture_figure3();

}  // namespace aid
