#include <gtest/gtest.h>

#include <algorithm>

#include "aid/error.hpp"
#include "aid/target_oracle.hpp"
#include "models.hpp"

using namespace aid;

namespace {

bool all_fail(const std::vector<ExecutionRun>& runs) {
  return std::all_of(runs.begin(), runs.end(), [](auto& r) { return r.failed(); });
}
bool none_fail(const std::vector<ExecutionRun>& runs) {
  return std::none_of(runs.begin(), runs.end(), [](auto& r) { return r.failed(); });
}

}  // namespace

TEST(TargetOracle, TruePath) {
  auto fx = golden_fixture_figure3();
  EXPECT_EQ(fx.model.true_causal_path(), (std::vector<PredicateId>{"P1", "P2", "P11", "F"}));
  EXPECT_NO_THROW(fx.model.validate());
}

TEST(TargetOracle, InterventionOutcomes) {
  auto m = golden_fixture_figure3().model;
  EXPECT_TRUE(none_fail(simulate(m, {"P1"}, 20, 5)));
  EXPECT_TRUE(all_fail(simulate(m, {}, 20, 5)));
  EXPECT_TRUE(all_fail(simulate(m, {"P7"}, 20, 5)));
  EXPECT_TRUE(all_fail(simulate(m, {"P4", "P5", "P6"}, 20, 5)));
  EXPECT_TRUE(none_fail(simulate(m, {"P11"}, 20, 5)));
}

TEST(TargetOracle, CorrelatedFollowsParent) {
  auto m = golden_fixture_figure3().model;
  for (const auto& r : simulate(m, {"P2"}, 5, 9)) {
    EXPECT_TRUE(r.observed("P1"));
    EXPECT_FALSE(r.observed("P3"));
    EXPECT_TRUE(r.observed("P7"));
    EXPECT_FALSE(r.observed("F"));
  }
}

TEST(TargetOracle, Pure) {
  auto m = golden_fixture_figure3().model;
  auto a = simulate(m, {"P3"}, 10, 42), b = simulate(m, {"P3"}, 10, 42);
  EXPECT_EQ(nlohmann::json(a).dump(), nlohmann::json(b).dump());
  SimulatedOracle o(m);
  EXPECT_EQ(nlohmann::json(o.intervene({"P3", "P4"}, 4)).dump(), nlohmann::json(o.intervene({"P4", "P3"}, 4)).dump());
}

TEST(TargetOracle, RunsFollowTemporalOrder) {
  auto m = golden_fixture_figure3().model;
  for (const auto& r : simulate(m, {}, 10, 3))
    for (const auto& [a, b] : m.temporal_edges) EXPECT_LT(r.observations.at(a).end, r.observations.at(b).start);
}

TEST(TargetOracle, Errors) {
  auto m = golden_fixture_figure3().model;
  EXPECT_THROW(simulate(m, {}, 0, 1), Error);
  EXPECT_THROW(simulate(m, {"Nope"}, 1, 1), Error);

  auto two_roots = aid::testing::chain_model(3, 1);
  two_roots.predicates[2].role = ModelRole::Causal;
  two_roots.predicates[2].parent.reset();
  EXPECT_THROW(two_roots.validate(), Error);

  auto no_root = aid::testing::chain_model(3, 0);
  EXPECT_THROW(no_root.validate(), Error);

  auto out_of_order = aid::testing::chain_model(3, 2);
  out_of_order.temporal_edges = {{"P2", "P1"}, {"P1", "P3"}, {"P3", "F"}};
  EXPECT_THROW(out_of_order.validate(), Error);

  auto noisy_parent = aid::testing::chain_model(3, 1);
  noisy_parent.predicates.push_back({"N", ModelRole::Noise, std::nullopt, 2.0, PredicateKind::Custom});
  EXPECT_THROW(noisy_parent.validate(), Error);
}

TEST(TargetOracle, SampleLogs) {
  auto m = golden_fixture_figure3().model;
  auto runs = sample_logs(m, 7, 5, 11);
  ASSERT_EQ(runs.size(), 12u);
  EXPECT_EQ(std::count_if(runs.begin(), runs.end(), [](auto& r) { return r.failed(); }), 7);
}

TEST(TargetOracle, ModelJsonRoundTrip) {
  auto m = golden_fixture_figure3().model;
  auto back = nlohmann::json(m).get<GroundTruthModel>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(m));
  EXPECT_EQ(back.true_causal_path(), m.true_causal_path());
}

TEST(TargetOracle, IntendedAcm) {
  auto g = intended_acm(golden_fixture_figure3().model);
  EXPECT_EQ(g.size(), 12u);
  EXPECT_FALSE(g.find("N1"));
  EXPECT_TRUE(g.reaches(g.index("P1"), g.index("P10")));
  EXPECT_FALSE(g.reaches(g.index("P4"), g.index("P7")));
}
