#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "aid/benchmark.hpp"
#include "aid/engine.hpp"
#include "aid/error.hpp"
#include "aid/target_oracle.hpp"
#include "models.hpp"

using namespace aid;
using aid::testing::P;

namespace {

using Names = std::vector<PredicateId>;

DiscoveryReport run(const GroundTruthModel& m, Strategy s, std::uint64_t seed,
                    std::optional<std::size_t> d = std::nullopt) {
  SimulatedOracle oracle(m);
  EngineOptions opt;
  opt.strategy = s;
  opt.seed = seed;
  opt.defectives = d;
  return causal_path_discovery(intended_acm(m), oracle, opt);
}

/// Runs that keep observing whatever was intervened on.
class LeakyOracle : public InterventionOracle {
 public:
  std::vector<ExecutionRun> intervene(const std::vector<PredicateId>& ps, std::size_t) override {
    ExecutionRun r{"leak", RunLabel::Failure, {}};
    for (const auto& p : ps) r.observe(p, {0, 1});
    return {r};
  }
};

class SilentOracle : public InterventionOracle {
 public:
  std::vector<ExecutionRun> intervene(const std::vector<PredicateId>&, std::size_t) override { return {}; }
};

ExecutionRun make_run(bool failed, const Names& observed) {
  ExecutionRun r{"r", failed ? RunLabel::Failure : RunLabel::Success, {}};
  for (const auto& p : observed) r.observe(p, {0, 1});
  return r;
}

}  // namespace

TEST(Strategy, Names) {
  for (auto s : {Strategy::AID, Strategy::AID_P, Strategy::AID_P_B, Strategy::TAGT})
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_EQ(parse_strategy("AID_P_B"), Strategy::AID_P_B);
  EXPECT_THROW(parse_strategy("bisect"), Error);
}

TEST(Walkthrough, EightRounds) {
  auto fx = golden_fixture_figure3();
  SimulatedOracle oracle(fx.model);
  EngineOptions opt;
  opt.seed = kFigure3Seed;
  auto rep = causal_path_discovery(fx.acm, oracle, opt);

  EXPECT_EQ(rep.causal_path, (Names{"P1", "P2", "P11", "F"}));
  ASSERT_EQ(rep.n_interventions, 8u);
  const auto& r = rep.rounds;
  std::vector<Names> intervened{{"P4", "P5", "P6"}, {"P8", "P9"}, {"P1", "P2", "P3"}, {"P1", "P2"},
                                {"P1"},             {"P2"},       {"P3"},             {"P11"}};
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(r[i].step, i + 1);
    EXPECT_EQ(r[i].phase, i < 2 ? "branch" : "chain");
    EXPECT_EQ(r[i].intervened, intervened[i]) << "step " << i + 1;
  }
  EXPECT_FALSE(r[0].failure_stopped);
  EXPECT_FALSE(r[1].failure_stopped);
  EXPECT_TRUE(r[2].failure_stopped);
  EXPECT_EQ(r[4].confirmed, Names{"P1"});
  EXPECT_EQ(r[5].confirmed, Names{"P2"});
  EXPECT_EQ(r[5].pruned, Names{"P7"});
  EXPECT_EQ(r[6].spurious, Names{"P3"});
  EXPECT_EQ(r[6].pruned, Names{"P10"});
  EXPECT_EQ(r[7].confirmed, Names{"P11"});
  EXPECT_EQ(rep.spurious, (std::set<PredicateId>{"P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10"}));
}

TEST(Walkthrough, BranchPruneLeavesChain) {
  auto fx = golden_fixture_figure3();
  SimulatedOracle oracle(fx.model);
  EngineOptions opt;
  opt.seed = kFigure3Seed;
  Engine e(fx.acm, oracle, opt);
  auto out = e.branch_prune();
  EXPECT_EQ(e.rounds().size(), 2u);
  Names chain;
  for (auto v : out.causal) chain.push_back(fx.acm.id(v));
  EXPECT_EQ(chain, (Names{"P1", "P2", "P3", "P7", "P11", "P10"}));
}

TEST(Walkthrough, GiwpOnChain) {
  auto fx = golden_fixture_figure3();
  SimulatedOracle oracle(fx.model);
  EngineOptions opt;
  opt.seed = kFigure3Seed;
  Engine e(fx.acm, oracle, opt);
  std::vector<std::size_t> cands;
  for (auto id : {"P1", "P2", "P3", "P7", "P10", "P11"}) cands.push_back(fx.acm.index(id));
  auto out = e.giwp(cands);
  Names causal;
  for (auto v : out.causal) causal.push_back(fx.acm.id(v));
  std::sort(causal.begin(), causal.end());
  EXPECT_EQ(causal, (Names{"P1", "P11", "P2"}));
  EXPECT_EQ(e.rounds().size(), 6u);
}

TEST(Walkthrough, Deterministic) {
  auto m = golden_fixture_figure3().model;
  for (auto s : bench::kStrategies)
    EXPECT_EQ(nlohmann::json(run(m, s, 17)).dump(), nlohmann::json(run(m, s, 17)).dump());
}

TEST(Walkthrough, ReportJsonRoundTrip) {
  auto rep = run(golden_fixture_figure3().model, Strategy::AID, kFigure3Seed);
  auto back = nlohmann::json(rep).get<DiscoveryReport>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(rep));
  EXPECT_EQ(back.version, std::string(kVersion));
}

TEST(Engine, SingleChainOneRound) {
  auto rep = run(aid::testing::chain_model(1, 1), Strategy::AID, 0);
  EXPECT_EQ(rep.causal_path, (Names{"P1", "F"}));
  EXPECT_EQ(rep.n_interventions, 1u);
}

TEST(Engine, ChainOfFourCounts) {
  auto m = aid::testing::chain_model(4, 1);
  EXPECT_EQ(run(m, Strategy::AID, 0).n_interventions, 3u);
  EXPECT_EQ(run(m, Strategy::AID_P, 0).n_interventions, 5u);
  EXPECT_EQ(run(m, Strategy::AID_P_B, 0).n_interventions, 5u);
  EXPECT_EQ(run(m, Strategy::TAGT, 0, 1).n_interventions, 2u);
  for (auto s : bench::kStrategies) EXPECT_EQ(run(m, s, 0, 1).causal_path, (Names{"P1", "F"}));
}

TEST(Engine, ChainNeedsNoBranchRounds) {
  auto m = aid::testing::chain_model(6, 3);
  SimulatedOracle oracle(m);
  auto g = intended_acm(m);
  Engine e(g, oracle, {});
  auto out = e.branch_prune();
  EXPECT_TRUE(e.rounds().empty());
  EXPECT_EQ(out.causal.size(), 6u);
}

TEST(Engine, FourWayJunction) {
  GroundTruthModel m;
  m.seed = 2;
  m.predicates = {{"R", ModelRole::Causal, std::nullopt, 1.0, PredicateKind::Custom},
                  {"A", ModelRole::Correlated, "R", 1.0, PredicateKind::Custom},
                  {"B", ModelRole::Causal, "R", 1.0, PredicateKind::Custom},
                  {"C", ModelRole::Correlated, "R", 1.0, PredicateKind::Custom},
                  {"D", ModelRole::Correlated, "R", 1.0, PredicateKind::Custom}};
  for (auto x : {"A", "B", "C", "D"}) {
    m.temporal_edges.emplace_back("R", x);
    m.temporal_edges.emplace_back(x, "F");
  }
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    auto rep = run(m, Strategy::AID, seed);
    EXPECT_EQ(rep.causal_path, (Names{"R", "B", "F"}));
    auto branch = std::count_if(rep.rounds.begin(), rep.rounds.end(), [](auto& r) { return r.phase == "branch"; });
    EXPECT_LE(branch, 2) << "seed " << seed;
  }
}

TEST(Engine, RandomTwentyNodeInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = bench::generate_instance(3, seed, 20, 20);
    ASSERT_EQ(inst.acm.size(), 21u);
    for (auto s : bench::kStrategies) {
      SimulatedOracle oracle(inst.model);
      EngineOptions opt;
      opt.strategy = s;
      opt.seed = seed;
      if (s == Strategy::TAGT) opt.defectives = inst.D;
      EXPECT_EQ(causal_path_discovery(inst.acm, oracle, opt).causal_path, inst.model.true_causal_path())
          << to_string(s) << " seed " << seed;
    }
  }
}

TEST(Tagt, OneOfEight) {
  auto m = aid::testing::independent_model(8, 1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto rep = run(m, Strategy::TAGT, seed, 1);
    EXPECT_EQ(rep.causal_path, (Names{"P1", "F"}));
    EXPECT_LE(rep.n_interventions, 3u);
  }
}

TEST(Tagt, TwoOfSixteen) {
  auto m = aid::testing::independent_model(16, 2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto rep = run(m, Strategy::TAGT, seed, 2);
    EXPECT_EQ(rep.causal_path, (Names{"P1", "P2", "F"}));
    EXPECT_LE(rep.n_interventions, 8u);
  }
}

TEST(Tagt, FixtureWithinEleven) {
  auto m = golden_fixture_figure3().model;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (auto d : {std::optional<std::size_t>{}, std::optional<std::size_t>{3}}) {
      auto rep = run(m, Strategy::TAGT, seed, d);
      EXPECT_EQ(rep.causal_path, (Names{"P1", "P2", "P11", "F"}));
      if (d) EXPECT_LE(rep.n_interventions, 11u) << "seed " << seed;
      for (const auto& r : rep.rounds) EXPECT_TRUE(r.pruned.empty());
    }
  }
}

TEST(Prune, Examples) {
  // U unrelated to C; P precedes C.
  auto g = AcmGraph::from_edges({"P", "C", "U", "F"}, {{"P", "C"}, {"C", "F"}, {"U", "F"}}, "F");
  auto c = g.index("C");
  std::vector<InterventionUnit> others{{g.index("P"), {g.index("P")}}, {g.index("U"), {g.index("U")}}};

  EXPECT_TRUE(interventional_prune({make_run(true, {"U", "F"})}, {c}, others, g).empty());
  EXPECT_EQ(interventional_prune({make_run(false, {"P", "U"})}, {c}, others, g), std::vector<std::size_t>{1});
  EXPECT_EQ(interventional_prune({make_run(true, {"F"})}, {c}, others, g), std::vector<std::size_t>{1});
  EXPECT_TRUE(interventional_prune({make_run(false, {})}, {c}, others, g).empty());
}

TEST(Prune, NeverRemovesAncestors) {
  Rng rng = make_rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<std::size_t> size(2, 12);
    auto n = size(rng);
    std::vector<PredicateId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(P(i));
    ids.push_back("F");
    std::vector<std::pair<PredicateId, PredicateId>> edges;
    std::bernoulli_distribution edge(0.3), coin(0.5);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b)
        if (edge(rng)) edges.emplace_back(P(a), P(b));
      edges.emplace_back(P(a), "F");
    }
    auto g = AcmGraph::from_edges(ids, edges, "F");

    std::vector<std::size_t> intervened;
    std::vector<InterventionUnit> others;
    for (std::size_t i = 0; i < n; ++i) {
      if (coin(rng)) intervened.push_back(i);
      else others.push_back({i, {i}});
    }
    if (intervened.empty()) continue;
    std::vector<ExecutionRun> runs;
    for (int r = 0; r < 3; ++r) {
      Names obs;
      for (std::size_t i = 0; i < n; ++i)
        if (coin(rng)) obs.push_back(P(i));
      runs.push_back(make_run(coin(rng), obs));
    }
    for (auto k : interventional_prune(runs, intervened, others, g))
      for (auto c : intervened) ASSERT_FALSE(g.reaches(others[k].head, c)) << "trial " << trial;
  }
}

TEST(Engine, UnsafePredicatesAreNeverIntervened) {
  auto fx = golden_fixture_figure3();
  SimulatedOracle oracle(fx.model);
  EngineOptions opt;
  opt.seed = kFigure3Seed;
  opt.unsafe = {"P1"};
  auto rep = causal_path_discovery(fx.acm, oracle, opt);
  for (const auto& r : rep.rounds) EXPECT_EQ(std::count(r.intervened.begin(), r.intervened.end(), "P1"), 0);

  Engine e(fx.acm, oracle, opt);
  EXPECT_THROW(e.giwp({fx.acm.index("P1")}), Error);
}

TEST(Engine, UnsafeRootMeansNoPath) {
  auto m = aid::testing::chain_model(1, 1);
  SimulatedOracle oracle(m);
  EngineOptions opt;
  opt.unsafe = {"P1"};
  auto rep = causal_path_discovery(intended_acm(m), oracle, opt);
  EXPECT_FALSE(rep.found());
  EXPECT_EQ(rep.n_interventions, 0u);
}

TEST(Engine, OracleMisbehaviour) {
  auto g = intended_acm(aid::testing::chain_model(3, 1));
  LeakyOracle leaky;
  EXPECT_THROW(causal_path_discovery(g, leaky, {}), Error);
  SilentOracle silent;
  EXPECT_THROW(causal_path_discovery(g, silent, {}), Error);
  EngineOptions zero;
  zero.repetitions = 0;
  EXPECT_THROW(Engine(g, silent, zero), Error);
  Engine e(g, silent, {});
  EXPECT_THROW(e.giwp({g.failure()}), Error);
}

TEST(Engine, RepetitionsAreRecorded) {
  auto m = golden_fixture_figure3().model;
  SimulatedOracle oracle(m);
  EngineOptions opt;
  opt.seed = kFigure3Seed;
  opt.repetitions = 3;
  auto rep = causal_path_discovery(intended_acm(m), oracle, opt);
  EXPECT_EQ(rep.causal_path, (Names{"P1", "P2", "P11", "F"}));
  for (const auto& r : rep.rounds) EXPECT_EQ(r.repetitions, 3u);
}
