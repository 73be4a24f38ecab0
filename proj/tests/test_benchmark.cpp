#include <gtest/gtest.h>

#include <filesystem>

#include "aid/benchmark.hpp"
#include "aid/error.hpp"
#include "aid/io.hpp"

using namespace aid;
using namespace aid::bench;

TEST(Benchmark, MaxDefectives) {
  EXPECT_EQ(max_defectives(16), 4u);
  EXPECT_EQ(max_defectives(2), 2u);
  EXPECT_EQ(max_defectives(1), 1u);
  EXPECT_EQ(max_defectives(100), 15u);
}

TEST(Benchmark, InstancesRespectLimits) {
  for (std::size_t t : {2u, 5u}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      auto inst = generate_instance(t, seed, 4, 80);
      auto shape = theory::measure_shape(inst.acm);
      EXPECT_LE(shape.T, t);
      EXPECT_GE(shape.N, 4u);
      EXPECT_LE(shape.N, 80u);
      EXPECT_GE(inst.D, 1u);
      EXPECT_LE(inst.D, max_defectives(shape.N));
      EXPECT_EQ(inst.model.true_causal_path().size(), inst.D + 1);
      EXPECT_EQ(inst.acm.level(inst.acm.index(inst.model.true_causal_path().front())), 0u);
      EXPECT_NO_THROW(inst.model.validate());
    }
  }
}

TEST(Benchmark, Deterministic) {
  auto a = generate_instance(5, 77), b = generate_instance(5, 77);
  EXPECT_EQ(nlohmann::json(a.model), nlohmann::json(b.model));
  EXPECT_EQ(a.acm.to_json(), b.acm.to_json());
}

TEST(Benchmark, SmallExperimentIsCorrect) {
  BenchmarkConfig cfg;
  cfg.max_threads = {2, 4};
  cfg.instances = 15;
  cfg.max_predicates = 60;
  cfg.seed = 5;
  cfg.workers = 1;
  auto ex = run_experiment(cfg);
  EXPECT_EQ(ex.instances.size(), 30u);
  EXPECT_EQ(ex.rows.size(), 8u);
  for (const auto& r : ex.rows) EXPECT_EQ(r.correctness_rate, 1.0);
  auto again = run_experiment(cfg);
  EXPECT_EQ(instances_csv(ex.instances), instances_csv(again.instances));
  EXPECT_EQ(rows_csv(ex.rows), rows_csv(again.rows));
  EXPECT_EQ(measurements(ex.instances).size(), 30u);
}

TEST(Benchmark, WorkerCountDoesNotChangeResults) {
  BenchmarkConfig cfg;
  cfg.max_threads = {3};
  cfg.instances = 12;
  cfg.max_predicates = 40;
  cfg.workers = 1;
  auto one = run_experiment(cfg);
  cfg.workers = 4;
  auto four = run_experiment(cfg);
  EXPECT_EQ(instances_csv(one.instances), instances_csv(four.instances));
}

TEST(Benchmark, ConfigFile) {
  auto dir = std::filesystem::temp_directory_path() / "aid-bench-config";
  std::filesystem::create_directories(dir);
  io::write_text(dir / "ok.toml", "max_threads = [2, 3]\ninstances = 7\nseed = 9\n");
  auto c = load_benchmark_config(dir / "ok.toml");
  EXPECT_EQ(c.max_threads, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(c.instances, 7u);
  EXPECT_EQ(c.seed, 9u);

  io::write_text(dir / "full.toml", "scale = \"full\"\n");
  auto p = load_benchmark_config(dir / "full.toml");
  EXPECT_EQ(p.max_threads.size(), 20u);
  EXPECT_EQ(p.instances, 500u);

  io::write_text(dir / "bad.toml", "max_thread = [2]\n");
  EXPECT_THROW(load_benchmark_config(dir / "bad.toml"), Error);
  io::write_text(dir / "bad2.toml", "max_threads = [1]\n");
  EXPECT_THROW(load_benchmark_config(dir / "bad2.toml"), Error);
}
