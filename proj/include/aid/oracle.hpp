#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "aid/predicate.hpp"

namespace aid {

/// The system under test, as seen by the intervention engine: re-execute the
/// application with a group of predicates forced to their successful-run
/// value and report the resulting predicate logs.
///
/// Implementations must be reentrant; the engine may issue the repetitions of
/// one round concurrently and does not depend on run order.
class InterventionOracle {
 public:
  virtual ~InterventionOracle() = default;
  virtual std::vector<ExecutionRun> intervene(const std::vector<PredicateId>& predicates,
                                              std::size_t repetitions) = 0;
};

/// Wire format of one intervention request (one JSON object per line).
struct InterventionRequest {
  std::vector<PredicateId> predicates;
  std::size_t repetitions = 1;
};

void to_json(nlohmann::json& j, const InterventionRequest& r);
void from_json(const nlohmann::json& j, InterventionRequest& r);

/// Shells out to `command` once per intervention: the request goes to its
/// stdin as a single JSON line, and the runs are read back from stdout as
/// JSONL ExecutionRun records.
class CommandOracle : public InterventionOracle {
 public:
  explicit CommandOracle(std::string command) : command_(std::move(command)) {}
  std::vector<ExecutionRun> intervene(const std::vector<PredicateId>& predicates,
                                      std::size_t repetitions) override;

 private:
  std::string command_;
};

}  // namespace aid
