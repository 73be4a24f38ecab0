#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aid/engine.hpp"
#include "aid/extract.hpp"
#include "aid/oracle.hpp"
#include "aid/target_oracle.hpp"

namespace aid {

/// Everything needed to replay a study. Either a simulated target (`model`,
/// from which both the observation logs and the intervention runs come) or
/// recorded traces plus an oracle.
struct StudyManifest {
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::AID;
  std::size_t repetitions = 1;
  std::filesystem::path out_dir{"aid-out"};
  std::optional<std::filesystem::path> policy;

  std::optional<std::string> model;  // model JSON path, or "figure3"
  std::size_t failed_runs = 20;
  std::size_t successful_runs = 20;

  std::optional<std::filesystem::path> traces;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> pure_methods;
  std::optional<std::string> oracle;  // "cmd:<shell command>", a model path, or "figure3"

  std::optional<std::size_t> defectives;
};

/// Reads a key = value manifest. Relative paths are resolved against the
/// manifest's directory; referenced files must exist.
StudyManifest load_manifest(const std::filesystem::path& path);

/// JSON object mapping run id to "failure" or "success".
RunLabels read_run_labels(const std::filesystem::path& path);

/// Whitespace-separated method names; '#' starts a comment.
std::set<std::string> read_method_list(const std::filesystem::path& path);

/// "figure3" or a model JSON file.
GroundTruthModel load_model(const std::string& spec);

/// "cmd:<command>" runs an external oracle; anything else is a model.
std::unique_ptr<InterventionOracle> make_oracle(const std::string& spec);

struct PipelineResult {
  DiscoveryReport report;
  std::vector<std::filesystem::path> artifacts;
};

/// extract (or sample) → filter → acm → discover, writing predicates.json,
/// runs.jsonl, stats.csv, acm.json, acm.dot and report.json into out_dir.
/// Errors name the failing stage; files already written are left in place.
PipelineResult run_pipeline(const StudyManifest& manifest);

}  // namespace aid
