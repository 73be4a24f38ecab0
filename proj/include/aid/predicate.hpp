#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace aid {

using PredicateId = std::string;
using RunId = std::string;
using Nanos = std::int64_t;

/// Identifier used for the failure-indicating predicate throughout.
inline constexpr std::string_view kFailureId = "F";

enum class AccessMode { Read, Write };

struct ObjectAccess {
  std::string object;
  AccessMode mode = AccessMode::Read;
};

/// One dynamic method invocation recorded by the tracer.
struct MethodEvent {
  RunId run_id;
  std::string thread_id;
  std::string method;
  std::uint32_t instance_index = 1;  // k-th occurrence of `method` in the run
  Nanos t_start = 0;
  Nanos t_end = 0;
  std::vector<ObjectAccess> objects_accessed;
  std::optional<std::string> return_value;  // canonical JSON text of the scalar
  bool threw_exception = false;

  Nanos duration() const { return t_end - t_start; }
};

enum class PredicateKind {
  DataRace,
  MethodFails,
  TooFast,
  TooSlow,
  WrongReturn,
  CompoundConjunction,
  Custom,
};

std::string_view to_string(PredicateKind kind);
PredicateKind parse_predicate_kind(std::string_view name);

struct MethodRef {
  std::string method;
  std::uint32_t instance = 1;

  auto operator<=>(const MethodRef&) const = default;
};

struct Predicate {
  PredicateId id;
  PredicateKind kind = PredicateKind::Custom;
  std::vector<MethodRef> subject;   // sorted
  std::string object;               // DataRace only
  std::vector<PredicateId> conjuncts;  // CompoundConjunction only
  bool safe_to_intervene = true;
};

/// Canonical identity of an extracted predicate. Subjects are sorted so that
/// the identity does not depend on argument order.
PredicateId canonical_id(PredicateKind kind, std::vector<MethodRef> subject,
                         std::string_view object = {});

/// Builds a compound predicate. Throws on fewer than two distinct conjuncts.
Predicate make_compound(std::vector<PredicateId> conjuncts);

struct TimeWindow {
  Nanos start = 0;
  Nanos end = 0;

  bool operator==(const TimeWindow&) const = default;
};

struct PredicateObservation {
  PredicateId pred_id;
  RunId run_id;
  TimeWindow window;
};

enum class RunLabel { Success, Failure };

std::string_view to_string(RunLabel label);
RunLabel parse_run_label(std::string_view name);

/// A labeled execution: the set of predicates that held, with their windows.
/// Keyed by predicate, so a run can observe each predicate at most once.
struct ExecutionRun {
  RunId run_id;
  RunLabel label = RunLabel::Success;
  std::map<PredicateId, TimeWindow> observations;

  bool failed() const { return label == RunLabel::Failure; }
  bool observed(const PredicateId& id) const { return observations.contains(id); }
  /// Adds an observation; throws on a duplicate or an inverted window.
  void observe(const PredicateId& id, TimeWindow window);
};

using PredicateCatalog = std::map<PredicateId, Predicate>;

// JSON mapping (field names match the on-disk JSONL formats)
void to_json(nlohmann::json& j, const ObjectAccess& a);
void from_json(const nlohmann::json& j, ObjectAccess& a);
void to_json(nlohmann::json& j, const MethodEvent& e);
void from_json(const nlohmann::json& j, MethodEvent& e);
void to_json(nlohmann::json& j, const Predicate& p);
void from_json(const nlohmann::json& j, Predicate& p);
void to_json(nlohmann::json& j, const ExecutionRun& r);
void from_json(const nlohmann::json& j, ExecutionRun& r);

}  // namespace aid
