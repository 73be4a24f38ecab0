#include "aid/pipeline.hpp"

#include <sstream>

#include "aid/acm.hpp"
#include "aid/config.hpp"
#include "aid/error.hpp"
#include "aid/extract.hpp"
#include "aid/io.hpp"
#include "aid/sd_filter.hpp"

namespace aid {

namespace fs = std::filesystem;

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error(std::string("stage ") + name + ": " + e.what());
  }
}

fs::path existing(const config::Document& doc, const std::string& key) {
  auto p = doc.get_path(key);
  if (!fs::exists(p)) throw Error("manifest key " + key + " points to missing file " + p.string());
  return p;
}

}  // namespace

std::set<std::string> read_method_list(const fs::path& path) {
  std::istringstream in(io::read_text(path));
  std::set<std::string> out;
  for (std::string line; std::getline(in, line);) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    for (std::string w; words >> w;) out.insert(w);
  }
  return out;
}

RunLabels read_run_labels(const fs::path& path) {
  auto doc = io::read_json(path);
  if (!doc.is_object()) throw Error(path.string() + ": expected an object mapping run ids to labels");
  RunLabels labels;
  for (const auto& [run, label] : doc.items()) {
    if (!label.is_string()) throw Error(path.string() + ": label of run " + run + " must be a string");
    labels[run] = parse_run_label(label.get<std::string>());
  }
  return labels;
}

StudyManifest load_manifest(const fs::path& path) {
  auto doc = config::Document::load(path);
  doc.require_known({"seed", "strategy", "repetitions", "out_dir", "policy", "model", "failed_runs",
                     "successful_runs", "traces", "labels", "pure_methods", "oracle", "defectives"});
  StudyManifest m;
  if (!doc.has("seed")) throw Error(path.string() + ": the manifest must set seed explicitly");
  m.seed = doc.get_uint("seed", 0);
  m.strategy = parse_strategy(doc.get_string("strategy", "aid"));
  m.repetitions = doc.get_uint("repetitions", 1);
  m.out_dir = doc.has("out_dir") ? doc.get_path("out_dir") : doc.base_dir() / "aid-out";
  if (doc.has("policy")) m.policy = existing(doc, "policy");
  auto model_spec = [&](const std::string& key) {
    auto v = doc.get_string(key);
    if (v == "figure3" || v.rfind("cmd:", 0) == 0) return v;
    return existing(doc, key).string();
  };
  if (doc.has("model")) m.model = model_spec("model");
  m.failed_runs = doc.get_uint("failed_runs", m.failed_runs);
  m.successful_runs = doc.get_uint("successful_runs", m.successful_runs);
  if (doc.has("traces")) m.traces = existing(doc, "traces");
  if (doc.has("labels")) m.labels = existing(doc, "labels");
  if (doc.has("pure_methods")) m.pure_methods = existing(doc, "pure_methods");
  if (doc.has("oracle")) m.oracle = model_spec("oracle");
  if (doc.has("defectives")) m.defectives = doc.get_uint("defectives", 0);

  if (m.traces) {
    if (!m.labels) throw Error(path.string() + ": traces need a labels file");
    if (!m.oracle) throw Error(path.string() + ": traces need an oracle");
  } else if (!m.model) {
    throw Error(path.string() + ": set either model or traces");
  }
  if (m.repetitions == 0) throw Error(path.string() + ": repetitions must be at least 1");
  return m;
}

GroundTruthModel load_model(const std::string& spec) {
  if (spec == "figure3") return golden_fixture_figure3().model;
  return io::read_json(spec).get<GroundTruthModel>();
}

std::unique_ptr<InterventionOracle> make_oracle(const std::string& spec) {
  if (spec.rfind("cmd:", 0) == 0) return std::make_unique<CommandOracle>(spec.substr(4));
  return std::make_unique<SimulatedOracle>(load_model(spec));
}

PipelineResult run_pipeline(const StudyManifest& m) {
  PipelineResult result;
  fs::create_directories(m.out_dir);
  auto artifact = [&](const std::string& name) {
    result.artifacts.push_back(m.out_dir / name);
    return result.artifacts.back();
  };

  std::vector<ExecutionRun> runs;
  PredicateCatalog catalog;
  std::unique_ptr<InterventionOracle> oracle;

  if (m.traces) {
    stage("extract", [&] {
      auto events = io::read_jsonl<MethodEvent>(*m.traces);
      auto labels = read_run_labels(*m.labels);
      auto traces = group_by_run(events);
      ExtractionOptions opt;
      if (m.pure_methods) opt.state_preserving_methods = read_method_list(*m.pure_methods);
      auto ex = extract_predicates(traces, labels, compute_baseline(traces, labels), opt);
      for (const auto& p : ex.predicates) catalog.emplace(p.id, p);
      runs = std::move(ex.runs);
    });
    oracle = stage("oracle", [&] { return make_oracle(*m.oracle); });
  } else {
    stage("sample", [&] {
      auto model = load_model(*m.model);
      runs = sample_logs(model, m.failed_runs, m.successful_runs, derive_seed(m.seed, "logs"));
      for (const auto& p : model.predicates) {
        Predicate pred;
        pred.id = p.id;
        pred.kind = p.kind;
        pred.safe_to_intervene = true;
        catalog.emplace(p.id, pred);
      }
      oracle = std::make_unique<SimulatedOracle>(std::move(model));
    });
  }

  stage("extract", [&] {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& [id, p] : catalog) preds.push_back(p);
    io::write_text(artifact("predicates.json"), preds.dump(2) + "\n");
    io::write_jsonl(artifact("runs.jsonl"), runs);
  });

  auto selected = stage("filter", [&] {
    auto stats = compute_stats(runs);
    auto chosen = fully_discriminative(stats, catalog);
    io::write_text(artifact("stats.csv"), stats_csv(stats, chosen));
    return chosen;
  });

  auto acm = stage("acm", [&] {
    auto policy = m.policy ? io::read_json(*m.policy).get<PrecedencePolicy>() : PrecedencePolicy::standard();
    auto g = build_acm(selected, runs, policy, std::string(kFailureId), catalog);
    io::write_text(artifact("acm.json"), g.to_json().dump(2) + "\n");
    io::write_text(artifact("acm.dot"), g.to_dot());
    return g;
  });

  result.report = stage("discover", [&] {
    EngineOptions opt;
    opt.strategy = m.strategy;
    opt.repetitions = m.repetitions;
    opt.seed = m.seed;
    opt.defectives = m.defectives;
    for (const auto& [id, p] : catalog)
      if (!p.safe_to_intervene) opt.unsafe.insert(id);
    auto report = causal_path_discovery(acm, *oracle, opt);
    io::write_text(artifact("report.json"), nlohmann::json(report).dump(2) + "\n");
    return report;
  });
  return result;
}

}  // namespace aid
