// aid: command-line front end for the predicate, ACM, intervention and
// benchmark stages.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "aid/acm.hpp"
#include "aid/benchmark.hpp"
#include "aid/engine.hpp"
#include "aid/error.hpp"
#include "aid/extract.hpp"
#include "aid/io.hpp"
#include "aid/pipeline.hpp"
#include "aid/sd_filter.hpp"
#include "aid/target_oracle.hpp"
#include "aid/theory.hpp"

namespace fs = std::filesystem;
using namespace aid;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) out.push_back(item);
  return out;
}

std::vector<std::uint64_t> parse_numbers(const std::string& s, std::size_t want, const char* flag) {
  auto parts = split_csv(s);
  if (parts.size() != want) throw Error(fmt::format("{} expects {} comma-separated values", flag, want));
  std::vector<std::uint64_t> out;
  for (const auto& p : parts) out.push_back(std::stoull(p));
  return out;
}

PredicateCatalog read_catalog(const std::string& path) {
  PredicateCatalog catalog;
  if (path.empty()) return catalog;
  for (const auto& p : io::read_json(path).get<std::vector<Predicate>>()) catalog.emplace(p.id, p);
  return catalog;
}

int serve(const GroundTruthModel& model) {
  SimulatedOracle oracle(model);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto req = nlohmann::json::parse(line).get<InterventionRequest>();
    std::cout << io::to_jsonl(oracle.intervene(req.predicates, req.repetitions)) << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal path discovery by group intervention over predicate logs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // extract
  auto* extract = app.add_subcommand("extract", "Evaluate predicates over method-event traces");
  std::string traces, labels, pure, runs_out, predicates_out;
  extract->add_option("--traces", traces, "Method events, JSONL")->required()->check(CLI::ExistingFile);
  extract->add_option("--labels", labels, "JSON object run_id -> failure|success")->required()->check(CLI::ExistingFile);
  extract->add_option("--pure-methods", pure, "Whitespace-separated state-preserving methods")->check(CLI::ExistingFile);
  extract->add_option("--out", runs_out, "Predicate log, JSONL")->required();
  extract->add_option("--predicates", predicates_out, "Predicate catalog, JSON");

  // filter
  auto* filter = app.add_subcommand("filter", "Select fully-discriminative predicates");
  std::string logs, catalog_in, filter_out;
  filter->add_option("--logs", logs, "Predicate log, JSONL")->required()->check(CLI::ExistingFile);
  filter->add_option("--predicates", catalog_in, "Predicate catalog (for safety flags)")->check(CLI::ExistingFile);
  filter->add_option("--out", filter_out, "Statistics CSV")->required();

  // acm
  auto* acm_cmd = app.add_subcommand("acm", "Build the approximate causal DAG");
  std::string policy_path, acm_out;
  acm_cmd->add_option("--logs", logs, "Predicate log, JSONL")->required()->check(CLI::ExistingFile);
  acm_cmd->add_option("--policy", policy_path, "Precedence policy JSON (default: standard)")->check(CLI::ExistingFile);
  acm_cmd->add_option("--predicates", catalog_in, "Predicate catalog")->check(CLI::ExistingFile);
  acm_cmd->add_option("--out", acm_out, "Output path; writes both .json and .dot")->required();

  // discover
  auto* discover = app.add_subcommand("discover", "Find the causal path by intervention");
  std::string acm_in, oracle_spec, strategy = "aid", report_out, unsafe_list;
  std::uint64_t seed = 0;
  std::size_t reps = 1;
  std::optional<std::size_t> defectives;
  discover->add_option("--acm", acm_in, "ACM JSON")->check(CLI::ExistingFile);
  discover->add_option("--oracle", oracle_spec, "Model JSON, figure3, or cmd:<command>")->required();
  discover->add_option("--strategy", strategy, "aid | aid-p | aid-p-b | tagt");
  discover->add_option("--seed", seed, "Tie-breaking seed")->required();
  discover->add_option("--reps", reps, "Executions per intervention")->check(CLI::PositiveNumber);
  discover->add_option("--report", report_out, "Report JSON (default: stdout)");
  discover->add_option("--defectives", defectives, "Number of causal predicates (TAGT)");
  discover->add_option("--unsafe", unsafe_list, "Comma-separated predicates that must not be intervened on");

  // oracle serve
  auto* oracle_cmd = app.add_subcommand("oracle", "Simulated target application");
  oracle_cmd->require_subcommand(1);
  auto* serve_cmd = oracle_cmd->add_subcommand("serve", "Answer intervention requests (JSON lines on stdin)");
  std::string model_spec;
  std::optional<std::uint64_t> model_seed;
  serve_cmd->add_option("--model", model_spec, "Model JSON or figure3")->required();
  serve_cmd->add_option("--seed", model_seed, "Override the model seed");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Synthetic sensitivity experiment");
  std::string bench_config, bench_out, bench_instances;
  bench_cmd->add_option("--config", bench_config, "Key = value settings file")->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench_out, "Aggregated CSV")->required();
  bench_cmd->add_option("--instances-out", bench_instances, "Per-instance CSV");

  // theory
  auto* theory_cmd = app.add_subcommand("theory", "Search-space sizes and intervention bounds");
  std::string symmetric, bounds, theory_csv;
  theory_cmd->add_option("--symmetric", symmetric, "J,B,n")->required();
  theory_cmd->add_option("--bounds", bounds, "N,D,S1,S2,T,Nm");
  theory_cmd->add_option("--csv", theory_csv, "Also write the values as CSV");

  // fixture
  auto* fixture_cmd = app.add_subcommand("fixture", "Write a built-in fixture");
  std::string fixture_name, fixture_model_out, fixture_acm_out;
  fixture_cmd->add_option("name", fixture_name, "figure3")->required()->check(CLI::IsMember({"figure3"}));
  fixture_cmd->add_option("--model", fixture_model_out, "Model JSON (default: stdout)");
  fixture_cmd->add_option("--acm", fixture_acm_out, "ACM JSON");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run every stage from a manifest");
  std::string manifest;
  run_cmd->add_option("--manifest", manifest, "Study manifest")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      auto events = io::read_jsonl<MethodEvent>(traces);
      auto run_labels = read_run_labels(labels);
      auto grouped = group_by_run(events);
      ExtractionOptions opt;
      if (!pure.empty()) opt.state_preserving_methods = read_method_list(pure);
      auto ex = extract_predicates(grouped, run_labels, compute_baseline(grouped, run_labels), opt);
      for (const auto& w : ex.warnings) std::cerr << "aid: warning: " << w << "\n";
      io::write_jsonl(runs_out, ex.runs);
      if (!predicates_out.empty()) io::write_text(predicates_out, nlohmann::json(ex.predicates).dump(2) + "\n");
      std::cerr << fmt::format("{} predicates over {} runs\n", ex.predicates.size(), ex.runs.size());
      return 0;
    }

    if (*filter) {
      auto runs = io::read_jsonl<ExecutionRun>(logs);
      auto stats = compute_stats(runs);
      auto selected = fully_discriminative(stats, read_catalog(catalog_in));
      io::write_text(filter_out, stats_csv(stats, selected));
      std::cerr << fmt::format("{} of {} predicates are fully discriminative\n", selected.size(), stats.size());
      return 0;
    }

    if (*acm_cmd) {
      auto runs = io::read_jsonl<ExecutionRun>(logs);
      auto catalog = read_catalog(catalog_in);
      auto policy = policy_path.empty() ? PrecedencePolicy::standard() : io::read_json(policy_path).get<PrecedencePolicy>();
      auto selected = fully_discriminative(compute_stats(runs), catalog);
      auto g = build_acm(selected, runs, policy, std::string(kFailureId), catalog);
      fs::path out(acm_out);
      auto json_path = out, dot_path = out;
      json_path.replace_extension(".json");
      dot_path.replace_extension(".dot");
      io::write_text(json_path, g.to_json().dump(2) + "\n");
      io::write_text(dot_path, g.to_dot());
      for (const auto& d : g.diagnostics()) std::cerr << "aid: note: " << d << "\n";
      return 0;
    }

    if (*discover) {
      AcmGraph g;
      if (!acm_in.empty())
        g = AcmGraph::from_json(io::read_json(acm_in));
      else if (oracle_spec.rfind("cmd:", 0) != 0)
        g = intended_acm(load_model(oracle_spec));
      else
        throw Error("--acm is required with a command oracle");
      auto oracle = make_oracle(oracle_spec);
      EngineOptions opt;
      opt.strategy = parse_strategy(strategy);
      opt.seed = seed;
      opt.repetitions = reps;
      opt.defectives = defectives;
      for (const auto& id : split_csv(unsafe_list)) opt.unsafe.insert(id);
      auto report = causal_path_discovery(g, *oracle, opt);
      auto text = nlohmann::json(report).dump(2) + "\n";
      if (report_out.empty())
        std::cout << text;
      else
        io::write_text(report_out, text);
      if (!report.found()) {
        std::cerr << "aid: no counterfactual cause found\n";
        return 1;
      }
      return 0;
    }

    if (*serve_cmd) {
      auto model = load_model(model_spec);
      if (model_seed) model.seed = *model_seed;
      return serve(model);
    }

    if (*bench_cmd) {
      auto cfg = bench_config.empty() ? bench::BenchmarkConfig{} : bench::load_benchmark_config(bench_config);
      auto ex = bench::run_experiment(cfg);
      io::write_text(bench_out, bench::rows_csv(ex.rows));
      if (!bench_instances.empty()) io::write_text(bench_instances, bench::instances_csv(ex.instances));
      std::cout << bench::rows_csv(ex.rows);
      return 0;
    }

    if (*theory_cmd) {
      auto s = parse_numbers(symmetric, 3, "--symmetric");
      std::vector<std::pair<std::string, std::string>> rows;
      rows.emplace_back("search_space_cpd", theory::search_space_symmetric(s[0], s[1], s[2]).str());
      rows.emplace_back("search_space_gt", theory::search_space_gt(s[0] * s[1] * s[2]).str());
      if (!bounds.empty()) {
        auto parts = split_csv(bounds);
        if (parts.size() != 6) throw Error("--bounds expects N,D,S1,S2,T,Nm");
        theory::BoundInputs in;
        in.N = std::stoull(parts[0]);
        in.D = std::stoull(parts[1]);
        in.S1 = std::stod(parts[2]);
        in.S2 = std::stod(parts[3]);
        in.T = std::stoull(parts[4]);
        in.N_M = std::stoull(parts[5]);
        in.J = s[0];
        in.B = s[1];
        in.n = s[2];
        auto u = theory::upper_bounds(in);
        rows.emplace_back("lower_bound_gt", fmt::format("{:.6f}", theory::lower_bound_gt(in.N, in.D)));
        rows.emplace_back("lower_bound_cpd", fmt::format("{:.6f}", theory::lower_bound_cpd(in.N, in.D, in.S1)));
        rows.emplace_back("upper_aid_branch", fmt::format("{:.6f}", u.aid_branch));
        rows.emplace_back("upper_tagt_branch", fmt::format("{:.6f}", u.tagt_branch));
        rows.emplace_back("upper_thm4", fmt::format("{:.6f}", u.thm4));
        rows.emplace_back("upper_tagt", fmt::format("{:.6f}", u.tagt));
        rows.emplace_back("j_below_d", u.j_below_d ? "true" : "false");
        rows.emplace_back("aid_branch_below_tagt", u.aid_branch_below_tagt ? "true" : "false");
        for (const auto& r : theory::symmetric_table(s[0], s[1], s[2], in.D, in.S1, in.S2)) {
          rows.emplace_back("symmetric_" + r.approach + "_lower", fmt::format("{:.6f}", r.lower));
          rows.emplace_back("symmetric_" + r.approach + "_upper", fmt::format("{:.6f}", r.upper));
        }
      }
      std::size_t width = 0;
      for (const auto& [k, v] : rows) width = std::max(width, k.size());
      for (const auto& [k, v] : rows) std::cout << fmt::format("{:<{}}  {}\n", k, width, v);
      if (!theory_csv.empty()) {
        std::string csv = "quantity,value\n";
        for (const auto& [k, v] : rows) csv += k + "," + v + "\n";
        io::write_text(theory_csv, csv);
      }
      return 0;
    }

    if (*fixture_cmd) {
      auto f = golden_fixture_figure3();
      auto text = nlohmann::json(f.model).dump(2) + "\n";
      if (fixture_model_out.empty())
        std::cout << text;
      else
        io::write_text(fixture_model_out, text);
      if (!fixture_acm_out.empty()) io::write_text(fixture_acm_out, f.acm.to_json().dump(2) + "\n");
      return 0;
    }

    if (*run_cmd) {
      auto result = run_pipeline(load_manifest(manifest));
      for (const auto& a : result.artifacts) std::cerr << "wrote " << a.string() << "\n";
      if (!result.report.found()) {
        std::cerr << "aid: no counterfactual cause found\n";
        return 1;
      }
      std::string path;
      for (const auto& p : result.report.causal_path) path += (path.empty() ? "" : " -> ") + p;
      std::cout << fmt::format("causal path: {} ({} interventions)\n", path, result.report.n_interventions);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "aid: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
