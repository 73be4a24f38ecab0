#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aid/acm.hpp"
#include "aid/engine.hpp"
#include "aid/target_oracle.hpp"
#include "aid/theory.hpp"

namespace aid::bench {

struct BenchmarkConfig {
  std::vector<std::size_t> max_threads{2, 5, 10, 20};
  std::size_t instances = 100;
  std::size_t min_predicates = 4;
  std::size_t max_predicates = 284;
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  /// Worker threads; 0 means one per hardware thread.
  std::size_t workers = 0;
  bool fail_on_incorrect = true;
};

/// Reads `max_threads`, `instances`, `min_predicates`, `max_predicates`,
/// `repetitions`, `seed` and `workers` from a key = value file. `scale =
/// "full"` starts from the full-scale settings instead of the defaults.
BenchmarkConfig load_benchmark_config(const std::filesystem::path& path);

/// Full-scale settings: MAX_t from 2 to 40, 500 applications each.
BenchmarkConfig full_scale();

/// Largest D allowed for N predicates: floor(N / log₂N), at least 1.
std::size_t max_defectives(std::size_t n);

struct Instance {
  GroundTruthModel model;
  AcmGraph acm;
  std::size_t max_threads = 0;
  std::size_t D = 0;
};

/// A random series-parallel application: chain segments alternating with
/// junctions of 2..max_threads branches. The causal path is a prefix of one
/// root-to-F route, starting at the first predicate.
Instance generate_instance(std::size_t max_threads, std::uint64_t seed,
                           std::size_t min_predicates = 4, std::size_t max_predicates = 284);

inline constexpr std::array<Strategy, 4> kStrategies{Strategy::AID, Strategy::AID_P, Strategy::AID_P_B,
                                                     Strategy::TAGT};

struct InstanceResult {
  std::size_t max_threads = 0;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t N = 0;
  std::size_t D = 0;
  theory::AcmShape shape;
  std::array<std::size_t, 4> interventions{};  // indexed like kStrategies
  std::array<bool, 4> correct{};
};

/// Runs every strategy on one instance against the same oracle seed.
InstanceResult evaluate_instance(const Instance& inst, std::uint64_t seed, std::size_t repetitions);

struct ExperimentRow {
  std::string setting;
  std::size_t max_threads = 0;
  Strategy strategy = Strategy::AID;
  std::size_t instances = 0;
  double mean_interventions = 0;
  std::size_t max_interventions = 0;
  double mean_N = 0;
  double correctness_rate = 0;
};

struct Experiment {
  std::vector<InstanceResult> instances;
  std::vector<ExperimentRow> rows;
};

/// Generates and evaluates all instances (in parallel), then aggregates per
/// setting and strategy. Throws Error on a wrong path when
/// `fail_on_incorrect` is set.
Experiment run_experiment(const BenchmarkConfig& config);

std::string rows_csv(const std::vector<ExperimentRow>& rows);
std::string instances_csv(const std::vector<InstanceResult>& rows);

std::vector<theory::InstanceMeasurement> measurements(const std::vector<InstanceResult>& rows);

}  // namespace aid::bench
