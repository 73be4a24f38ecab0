#include <gtest/gtest.h>

#include <filesystem>

#include "aid/error.hpp"
#include "aid/io.hpp"
#include "aid/pipeline.hpp"

using namespace aid;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("aid-pipeline-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

MethodEvent ev(const std::string& run, const std::string& method, Nanos s, Nanos e, bool threw = false) {
  MethodEvent m;
  m.run_id = run;
  m.thread_id = "T1";
  m.method = method;
  m.t_start = s;
  m.t_end = e;
  m.threw_exception = threw;
  return m;
}

}  // namespace

TEST(Pipeline, Figure3Study) {
  auto dir = scratch("figure3");
  io::write_text(dir / "study.toml", "seed = 7\nmodel = \"figure3\"\nfailed_runs = 30\nsuccessful_runs = 30\n");
  auto m = load_manifest(dir / "study.toml");
  EXPECT_EQ(m.out_dir, dir / "aid-out");
  auto res = run_pipeline(m);
  EXPECT_EQ(res.report.causal_path, (std::vector<PredicateId>{"P1", "P2", "P11", "F"}));
  EXPECT_EQ(res.report.n_interventions, 8u);
  for (auto name : {"predicates.json", "runs.jsonl", "stats.csv", "acm.json", "acm.dot", "report.json"})
    EXPECT_TRUE(fs::exists(m.out_dir / name)) << name;
  auto acm = AcmGraph::from_json(io::read_json(m.out_dir / "acm.json"));
  EXPECT_FALSE(acm.find("N1"));
  EXPECT_FALSE(acm.find("N2"));

  auto first = io::read_text(m.out_dir / "report.json");
  run_pipeline(m);
  EXPECT_EQ(io::read_text(m.out_dir / "report.json"), first);
}

TEST(Pipeline, NoFailedRunsFailsInFilterStage) {
  auto dir = scratch("nofail");
  io::write_text(dir / "study.toml", "seed = 1\nmodel = \"figure3\"\nfailed_runs = 0\n");
  try {
    run_pipeline(load_manifest(dir / "study.toml"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("stage filter: ", 0), 0u) << e.what();
  }
}

TEST(Pipeline, ManifestErrors) {
  auto dir = scratch("manifest");
  io::write_text(dir / "a.toml", "model = \"figure3\"\n");
  EXPECT_THROW(load_manifest(dir / "a.toml"), Error);
  io::write_text(dir / "b.toml", "seed = 1\nmodle = \"figure3\"\n");
  EXPECT_THROW(load_manifest(dir / "b.toml"), Error);
  io::write_text(dir / "c.toml", "seed = 1\nmodel = \"missing.json\"\n");
  EXPECT_THROW(load_manifest(dir / "c.toml"), Error);
  io::write_text(dir / "d.toml", "seed = 1\n");
  EXPECT_THROW(load_manifest(dir / "d.toml"), Error);
  io::write_text(dir / "t.jsonl", "");
  io::write_text(dir / "e.toml", "seed = 1\ntraces = \"t.jsonl\"\n");
  EXPECT_THROW(load_manifest(dir / "e.toml"), Error);
}

TEST(Pipeline, RecordedTraces) {
  auto dir = scratch("traces");
  // A throws in failing runs; B then runs too long and the run fails.
  std::vector<MethodEvent> events;
  nlohmann::json labels = nlohmann::json::object();
  for (int i = 0; i < 4; ++i) {
    auto f = "f" + std::to_string(i), s = "s" + std::to_string(i);
    events.push_back(ev(f, "A", 0, 10, true));
    events.push_back(ev(f, "B", 20, 100 + i));
    events.push_back(ev(s, "A", 0, 10));
    events.push_back(ev(s, "B", 20, 30 + i));
    labels[f] = std::string(to_string(RunLabel::Failure));
    labels[s] = std::string(to_string(RunLabel::Success));
  }
  io::write_jsonl(dir / "traces.jsonl", events);
  io::write_text(dir / "labels.json", labels.dump());

  auto a = canonical_id(PredicateKind::MethodFails, {{"A", 1}});
  auto b = canonical_id(PredicateKind::TooSlow, {{"B", 1}});
  GroundTruthModel model;
  model.seed = 4;
  model.predicates = {{a, ModelRole::Causal, std::nullopt, 1.0, PredicateKind::MethodFails},
                      {b, ModelRole::Causal, a, 1.0, PredicateKind::TooSlow}};
  model.temporal_edges = {{a, b}, {b, "F"}};
  io::write_text(dir / "model.json", nlohmann::json(model).dump());

  io::write_text(dir / "study.toml",
                 "seed = 3\ntraces = \"traces.jsonl\"\nlabels = \"labels.json\"\noracle = \"model.json\"\n");
  auto res = run_pipeline(load_manifest(dir / "study.toml"));
  EXPECT_EQ(res.report.causal_path, (std::vector<PredicateId>{a, b, "F"}));
}

TEST(Pipeline, RecordedTracesRespectPurity) {
  auto dir = scratch("pure");
  std::vector<MethodEvent> events;
  nlohmann::json labels = nlohmann::json::object();
  for (int i = 0; i < 3; ++i) {
    auto f = "f" + std::to_string(i), s = "s" + std::to_string(i);
    events.push_back(ev(f, "A", 0, 10, true));
    events.push_back(ev(s, "A", 0, 10));
    labels[f] = "failure";
    labels[s] = "success";
  }
  io::write_jsonl(dir / "traces.jsonl", events);
  io::write_text(dir / "labels.json", labels.dump());
  io::write_text(dir / "pure.txt", "Other\n");
  auto a = canonical_id(PredicateKind::MethodFails, {{"A", 1}});
  GroundTruthModel model;
  model.predicates = {{a, ModelRole::Causal, std::nullopt, 1.0, PredicateKind::MethodFails}};
  model.temporal_edges = {{a, "F"}};
  io::write_text(dir / "model.json", nlohmann::json(model).dump());
  io::write_text(dir / "study.toml", "seed = 3\ntraces = \"traces.jsonl\"\nlabels = \"labels.json\"\n"
                                     "oracle = \"model.json\"\npure_methods = \"pure.txt\"\n");
  auto res = run_pipeline(load_manifest(dir / "study.toml"));
  EXPECT_FALSE(res.report.found());
  EXPECT_EQ(res.report.n_interventions, 0u);
}

TEST(Pipeline, CommandOracle) {
  auto dir = scratch("command");
  io::write_text(dir / "study.toml", std::string("seed = 3\nmodel = \"figure3\"\noracle = \"cmd:") + AID_CLI_PATH +
                                         " oracle serve --model figure3\"\n");
  auto m = load_manifest(dir / "study.toml");
  ASSERT_TRUE(m.oracle);
  CommandOracle oracle(m.oracle->substr(4));
  auto runs = oracle.intervene({"P1"}, 3);
  ASSERT_EQ(runs.size(), 3u);
  for (const auto& r : runs) EXPECT_FALSE(r.failed());

  auto fx = golden_fixture_figure3();
  EngineOptions opt;
  opt.seed = kFigure3Seed;
  auto rep = causal_path_discovery(fx.acm, oracle, opt);
  EXPECT_EQ(rep.causal_path, (std::vector<PredicateId>{"P1", "P2", "P11", "F"}));
  EXPECT_EQ(rep.n_interventions, 8u);

  CommandOracle broken("exit 3");
  EXPECT_THROW(broken.intervene({"P1"}, 1), Error);
}

TEST(Pipeline, ModelAndOracleSpecs) {
  EXPECT_EQ(load_model("figure3").true_causal_path().size(), 4u);
  EXPECT_THROW(load_model("/nonexistent/model.json"), Error);
  EXPECT_NE(make_oracle("figure3"), nullptr);
}
