#include "aid/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "aid/config.hpp"
#include "aid/error.hpp"
#include "aid/random.hpp"

namespace aid::bench {

BenchmarkConfig full_scale() {
  BenchmarkConfig c;
  c.max_threads.clear();
  for (std::size_t t = 2; t <= 40; t += 2) c.max_threads.push_back(t);
  c.instances = 500;
  return c;
}

BenchmarkConfig load_benchmark_config(const std::filesystem::path& path) {
  auto doc = config::Document::load(path);
  doc.require_known({"scale", "max_threads", "instances", "min_predicates", "max_predicates", "repetitions", "seed",
                     "workers"});
  auto scale = doc.get_string("scale", "desk");
  if (scale != "desk" && scale != "full") throw Error(path.string() + ": scale must be desk or full");
  BenchmarkConfig c = scale == "full" ? full_scale() : BenchmarkConfig{};
  if (doc.has("max_threads")) {
    c.max_threads.clear();
    for (auto t : doc.get_int_list("max_threads")) {
      if (t < 2) throw Error(path.string() + ": max_threads entries must be at least 2");
      c.max_threads.push_back(static_cast<std::size_t>(t));
    }
  }
  c.instances = doc.get_uint("instances", c.instances);
  c.min_predicates = doc.get_uint("min_predicates", c.min_predicates);
  c.max_predicates = doc.get_uint("max_predicates", c.max_predicates);
  c.repetitions = doc.get_uint("repetitions", c.repetitions);
  c.seed = doc.get_uint("seed", c.seed);
  c.workers = doc.get_uint("workers", c.workers);
  return c;
}

std::size_t max_defectives(std::size_t n) {
  if (n < 2) return 1;
  auto d = static_cast<std::size_t>(std::floor(static_cast<double>(n) / std::log2(static_cast<double>(n))));
  return std::max<std::size_t>(d, 1);
}

Instance generate_instance(std::size_t max_threads, std::uint64_t seed, std::size_t min_predicates,
                           std::size_t max_predicates) {
  if (max_threads < 2) throw Error("max_threads must be at least 2");
  if (min_predicates > max_predicates) throw Error("predicate range is empty");

  for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
    auto rng = make_rng(derive_seed(seed, attempt));
    auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

    std::vector<std::vector<std::size_t>> preds;
    std::vector<std::size_t> route;
    auto add_node = [&](std::vector<std::size_t> from) {
      preds.push_back(std::move(from));
      return preds.size() - 1;
    };
    auto add_chain = [&](std::size_t len, std::vector<std::size_t> from) {
      std::vector<std::size_t> nodes;
      for (std::size_t i = 0; i < len; ++i) {
        nodes.push_back(add_node(from));
        from = {nodes.back()};
      }
      return nodes;
    };

    const std::size_t J = uniform(0, 3);
    auto seg = add_chain(uniform(1, 5), {});
    route = seg;
    std::vector<std::size_t> tails{seg.back()};
    for (std::size_t j = 0; j < J; ++j) {
      const std::size_t B = uniform(2, max_threads);
      const std::size_t taken = uniform(0, B - 1);
      std::vector<std::size_t> branch_tails;
      for (std::size_t b = 0; b < B; ++b) {
        auto branch = add_chain(uniform(1, 3), tails);
        if (b == taken) route.insert(route.end(), branch.begin(), branch.end());
        branch_tails.push_back(branch.back());
      }
      const std::size_t len = uniform(j + 1 == J ? 0 : 1, 5);
      if (len == 0) break;
      seg = add_chain(len, branch_tails);
      route.insert(route.end(), seg.begin(), seg.end());
      tails = {seg.back()};
    }

    const std::size_t N = preds.size();
    if (N < min_predicates || N > max_predicates) continue;
    const std::size_t D = uniform(1, max_defectives(N));
    if (D > route.size()) continue;

    std::vector<std::size_t> position(N, SIZE_MAX);
    for (std::size_t i = 0; i < D; ++i) position[route[i]] = i;

    Instance inst;
    inst.max_threads = max_threads;
    inst.D = D;
    auto& m = inst.model;
    m.seed = derive_seed(seed, "oracle");
    auto name = [](std::size_t v) { return "P" + std::to_string(v + 1); };
    for (std::size_t v = 0; v < N; ++v) {
      ModelPredicate p;
      p.id = name(v);
      p.kind = PredicateKind::Custom;
      if (position[v] != SIZE_MAX) {
        p.role = ModelRole::Causal;
        if (position[v] > 0) p.parent = name(route[position[v] - 1]);
      } else {
        // Effects follow one of their immediate temporal predecessors.
        p.role = ModelRole::Correlated;
        p.parent = name(preds[v][uniform(0, preds[v].size() - 1)]);
      }
      m.predicates.push_back(std::move(p));
      for (auto u : preds[v]) m.temporal_edges.emplace_back(name(u), name(v));
    }
    inst.acm = intended_acm(m);
    return inst;
  }
  throw Error("could not generate an instance within the predicate range");
}

InstanceResult evaluate_instance(const Instance& inst, std::uint64_t seed, std::size_t repetitions) {
  InstanceResult r;
  r.max_threads = inst.max_threads;
  r.seed = seed;
  r.N = inst.acm.size() - 1;
  r.D = inst.D;
  r.shape = theory::measure_shape(inst.acm);
  const auto truth = inst.model.true_causal_path();
  for (std::size_t k = 0; k < kStrategies.size(); ++k) {
    SimulatedOracle oracle(inst.model);
    EngineOptions opt;
    opt.strategy = kStrategies[k];
    opt.repetitions = repetitions;
    opt.seed = derive_seed(seed, "engine");
    if (opt.strategy == Strategy::TAGT) opt.defectives = inst.D;
    auto report = causal_path_discovery(inst.acm, oracle, opt);
    r.interventions[k] = report.n_interventions;
    r.correct[k] = report.causal_path == truth;
  }
  return r;
}

Experiment run_experiment(const BenchmarkConfig& config) {
  if (config.max_threads.empty()) throw Error("benchmark needs at least one max_threads setting");
  if (config.instances == 0) throw Error("benchmark needs at least one instance per setting");

  const std::size_t total = config.max_threads.size() * config.instances;
  Experiment ex;
  ex.instances.resize(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < total;) {
      try {
        const auto setting = t / config.instances;
        const auto index = t % config.instances;
        const auto threads = config.max_threads[setting];
        const auto seed = derive_seed(derive_seed(config.seed, threads), index);
        auto inst = generate_instance(threads, seed, config.min_predicates, config.max_predicates);
        auto r = evaluate_instance(inst, seed, config.repetitions);
        r.index = index;
        ex.instances[t] = r;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, total);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (std::size_t s = 0; s < config.max_threads.size(); ++s) {
    for (std::size_t k = 0; k < kStrategies.size(); ++k) {
      ExperimentRow row;
      row.max_threads = config.max_threads[s];
      row.setting = "max_t=" + std::to_string(row.max_threads);
      row.strategy = kStrategies[k];
      row.instances = config.instances;
      double sum = 0, sum_n = 0, ok = 0;
      for (std::size_t i = 0; i < config.instances; ++i) {
        const auto& r = ex.instances[s * config.instances + i];
        sum += static_cast<double>(r.interventions[k]);
        sum_n += static_cast<double>(r.N);
        ok += r.correct[k] ? 1 : 0;
        row.max_interventions = std::max(row.max_interventions, r.interventions[k]);
      }
      const auto n = static_cast<double>(config.instances);
      row.mean_interventions = sum / n;
      row.mean_N = sum_n / n;
      row.correctness_rate = ok / n;
      ex.rows.push_back(row);
    }
  }

  if (config.fail_on_incorrect) {
    for (const auto& r : ex.instances)
      for (std::size_t k = 0; k < kStrategies.size(); ++k)
        if (!r.correct[k])
          throw Error(fmt::format("{} found a wrong causal path on instance {} of max_t={} (seed {})",
                                  to_string(kStrategies[k]), r.index, r.max_threads, r.seed));
  }
  return ex;
}

std::string rows_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "setting,max_threads,strategy,instances,mean_interventions,max_interventions,mean_N,correctness_rate\n";
  for (const auto& r : rows)
    out << fmt::format("{},{},{},{},{:.4f},{},{:.4f},{:.4f}\n", r.setting, r.max_threads, to_string(r.strategy),
                       r.instances, r.mean_interventions, r.max_interventions, r.mean_N, r.correctness_rate);
  return out.str();
}

std::string instances_csv(const std::vector<InstanceResult>& rows) {
  std::ostringstream out;
  out << "max_threads,index,seed,N,D,J,T,N_M";
  for (auto s : kStrategies) out << ',' << to_string(s);
  out << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}", r.max_threads, r.index, r.seed, r.N, r.D, r.shape.J, r.shape.T,
                       r.shape.N_M);
    for (auto c : r.interventions) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

std::vector<theory::InstanceMeasurement> measurements(const std::vector<InstanceResult>& rows) {
  std::vector<theory::InstanceMeasurement> out;
  for (const auto& r : rows) {
    theory::InstanceMeasurement m;
    m.label = fmt::format("max_t={} #{}", r.max_threads, r.index);
    m.D = r.D;
    m.shape = r.shape;
    m.aid = r.interventions[0];
    m.tagt = r.interventions[3];
    out.push_back(m);
  }
  return out;
}

}  // namespace aid::bench
