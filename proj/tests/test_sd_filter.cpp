#include <gtest/gtest.h>

#include <random>

#include "aid/error.hpp"
#include "aid/random.hpp"
#include "aid/sd_filter.hpp"
#include "oracles.hpp"

using namespace aid;

namespace {

std::vector<ExecutionRun> runs_with(const std::string& id, int failed_with, int failed, int success_with,
                                    int success) {
  std::vector<ExecutionRun> runs;
  for (int i = 0; i < failed; ++i) {
    ExecutionRun r{"f" + std::to_string(i), RunLabel::Failure, {}};
    if (i < failed_with) r.observe(id, {0, 1});
    runs.push_back(r);
  }
  for (int i = 0; i < success; ++i) {
    ExecutionRun r{"s" + std::to_string(i), RunLabel::Success, {}};
    if (i < success_with) r.observe(id, {0, 1});
    runs.push_back(r);
  }
  return runs;
}

}  // namespace

TEST(SdFilter, PerfectPredicate) {
  auto s = compute_stats(runs_with("P", 50, 50, 0, 50)).at("P");
  EXPECT_DOUBLE_EQ(s.precision(), 1.0);
  EXPECT_DOUBLE_EQ(s.recall(), 1.0);
  EXPECT_TRUE(s.fully_discriminative());
}

TEST(SdFilter, InvariantPredicate) {
  auto s = compute_stats(runs_with("P", 50, 50, 50, 50)).at("P");
  EXPECT_DOUBLE_EQ(s.precision(), 0.5);
  EXPECT_DOUBLE_EQ(s.recall(), 1.0);
  EXPECT_FALSE(s.fully_discriminative());
}

TEST(SdFilter, PartialPredicate) {
  auto s = compute_stats(runs_with("P", 30, 50, 10, 50)).at("P");
  EXPECT_DOUBLE_EQ(s.precision(), 0.75);
  EXPECT_DOUBLE_EQ(s.recall(), 0.6);
}

TEST(SdFilter, RecallThresholdIsExact) {
  auto stats = compute_stats(runs_with("P", 49, 50, 0, 50));
  EXPECT_DOUBLE_EQ(stats.at("P").precision(), 1.0);
  EXPECT_DOUBLE_EQ(stats.at("P").recall(), 0.98);
  EXPECT_TRUE(fully_discriminative(stats, {}).empty());
}

TEST(SdFilter, UnsafeExcluded) {
  auto stats = compute_stats(runs_with("P", 5, 5, 0, 5));
  PredicateCatalog cat;
  cat["P"] = Predicate{"P", PredicateKind::Custom, {}, {}, {}, false};
  EXPECT_TRUE(fully_discriminative(stats, cat).empty());
  cat["P"].safe_to_intervene = true;
  EXPECT_EQ(fully_discriminative(stats, cat), std::set<PredicateId>{"P"});
}

TEST(SdFilter, NoFailedRunsIsAnError) {
  EXPECT_THROW(compute_stats(runs_with("P", 0, 0, 3, 5)), Error);
}

TEST(SdFilter, CsvHasHeaderAndSelection) {
  auto stats = compute_stats(runs_with("P", 5, 5, 0, 5));
  auto csv = stats_csv(stats, {"P"});
  EXPECT_EQ(csv.rfind("pred_id,n_failed_with,n_success_with,n_failed_total,precision,recall,selected", 0), 0u);
  EXPECT_NE(csv.find("P,5,0,5,"), std::string::npos);
}

TEST(SdFilter, MatchesDirectSetComputation) {
  Rng rng = make_rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> count(1, 12), preds(1, 10);
    std::bernoulli_distribution coin(0.7);
    int n_pred = preds(rng);
    int n_fail = count(rng), n_ok = count(rng) - 1;
    std::vector<ExecutionRun> runs;
    for (int i = 0; i < n_fail + n_ok; ++i) {
      ExecutionRun r{"r" + std::to_string(i), i < n_fail ? RunLabel::Failure : RunLabel::Success, {}};
      for (int p = 0; p < n_pred; ++p)
        if (coin(rng)) r.observe("P" + std::to_string(p), {0, 1});
      runs.push_back(std::move(r));
    }
    auto expected = aid::testing::in_all_failed_no_success(runs);
    auto got = fully_discriminative(compute_stats(runs), {});
    ASSERT_EQ(got, expected) << "trial " << trial;

    // Monotone: an extra successful run holding every predicate empties the set.
    ExecutionRun extra{"extra", RunLabel::Success, {}};
    for (int p = 0; p < n_pred; ++p) extra.observe("P" + std::to_string(p), {0, 1});
    runs.push_back(extra);
    ASSERT_TRUE(fully_discriminative(compute_stats(runs), {}).empty());
  }
}
