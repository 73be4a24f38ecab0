#include "aid/extract.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "aid/error.hpp"

namespace aid {

namespace {

void validate_trace(const Trace& trace) {
  if (trace.empty()) throw Error("empty trace");
  std::map<std::string, std::vector<const MethodEvent*>> by_method;
  for (const auto& e : trace) {
    if (e.t_start > e.t_end) throw Error("run " + e.run_id + ": event " + e.method + " ends before it starts");
    by_method[e.method].push_back(&e);
  }
  for (auto& [method, events] : by_method) {
    std::sort(events.begin(), events.end(),
              [](auto* a, auto* b) { return a->instance_index < b->instance_index; });
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i]->instance_index != i + 1)
        throw Error("run " + trace.front().run_id + ": instances of " + method +
                    " are not numbered 1.." + std::to_string(events.size()));
      if (i && events[i]->t_start < events[i - 1]->t_start)
        throw Error("run " + trace.front().run_id + ": instances of " + method +
                    " are not ordered by start time");
    }
  }
}

bool overlaps(const MethodEvent& a, const MethodEvent& b) {
  return a.t_start < b.t_end && b.t_start < a.t_end;
}

struct Emitter {
  ExecutionRun& run;
  std::map<PredicateId, Predicate>& catalog;

  void emit(Predicate p, TimeWindow w) {
    if (!run.observations.emplace(p.id, w).second) return;
    catalog.try_emplace(p.id, std::move(p));
  }
};

}  // namespace

std::vector<Trace> group_by_run(const std::vector<MethodEvent>& events) {
  std::map<RunId, Trace> runs;
  for (const auto& e : events) runs[e.run_id].push_back(e);
  std::vector<Trace> out;
  out.reserve(runs.size());
  for (auto& [id, t] : runs) out.push_back(std::move(t));
  return out;
}

Baseline compute_baseline(const std::vector<Trace>& traces, const RunLabels& labels) {
  Baseline b;
  for (const auto& trace : traces) {
    if (trace.empty()) continue;
    auto it = labels.find(trace.front().run_id);
    if (it == labels.end()) throw Error("run " + trace.front().run_id + " has no label");
    if (it->second != RunLabel::Success) continue;
    for (const auto& e : trace) {
      auto [slot, fresh] = b.methods.try_emplace(e.method);
      auto& m = slot->second;
      if (fresh) {
        m.min_duration = m.max_duration = e.duration();
      } else {
        m.min_duration = std::min(m.min_duration, e.duration());
        m.max_duration = std::max(m.max_duration, e.duration());
      }
      if (e.return_value) m.return_values.insert(*e.return_value);
      else m.missing_return = true;
    }
  }
  return b;
}

Extraction extract_predicates(const std::vector<Trace>& traces, const RunLabels& labels,
                              const Baseline& baseline, const ExtractionOptions& options) {
  Extraction out;
  std::map<PredicateId, Predicate> catalog;
  std::set<std::string> warned;
  auto warn = [&](std::string msg) {
    if (warned.insert(msg).second) out.warnings.push_back(std::move(msg));
  };
  auto state_preserving = [&](const std::string& method) {
    return !options.state_preserving_methods || options.state_preserving_methods->contains(method);
  };

  for (const auto& trace : traces) {
    validate_trace(trace);
    const RunId& run_id = trace.front().run_id;
    auto label = labels.find(run_id);
    if (label == labels.end()) throw Error("run " + run_id + " has no label");

    ExecutionRun run{run_id, label->second, {}};
    Emitter emitter{run, catalog};

    for (const auto& e : trace) {
      if (e.run_id != run_id) throw Error("trace for run " + run_id + " contains events of run " + e.run_id);
      MethodRef self{e.method, e.instance_index};
      TimeWindow w{e.t_start, e.t_end};

      if (e.threw_exception) {
        Predicate p{canonical_id(PredicateKind::MethodFails, {self}), PredicateKind::MethodFails,
                    {self}, {}, {}, state_preserving(e.method)};
        emitter.emit(std::move(p), w);
      }

      auto base = baseline.methods.find(e.method);
      if (base == baseline.methods.end()) {
        warn("no successful-run baseline for method " + e.method +
             "; skipping TooFast/TooSlow/WrongReturn");
        continue;
      }
      const auto& mb = base->second;
      if (e.duration() < mb.min_duration)
        emitter.emit({canonical_id(PredicateKind::TooFast, {self}), PredicateKind::TooFast, {self}, {}, {}, true}, w);
      if (e.duration() > mb.max_duration)
        emitter.emit({canonical_id(PredicateKind::TooSlow, {self}), PredicateKind::TooSlow, {self}, {}, {}, true}, w);
      auto expected = mb.unique_return();
      if (mb.return_values.size() > 1) {
        warn("successful runs disagree on the return value of " + e.method + "; skipping WrongReturn");
      } else if (expected && e.return_value != expected) {
        emitter.emit({canonical_id(PredicateKind::WrongReturn, {self}), PredicateKind::WrongReturn,
                      {self}, {}, {}, state_preserving(e.method)},
                     w);
      }
    }

    // Data races: cross-thread temporal overlap on a shared object, at least one write.
    std::map<std::string, std::vector<std::pair<const MethodEvent*, bool>>> by_object;
    for (const auto& e : trace) {
      std::map<std::string, bool> modes;
      for (const auto& a : e.objects_accessed) modes[a.object] |= (a.mode == AccessMode::Write);
      for (const auto& [obj, write] : modes) by_object[obj].emplace_back(&e, write);
    }
    for (const auto& [obj, accesses] : by_object) {
      for (std::size_t i = 0; i < accesses.size(); ++i) {
        for (std::size_t j = i + 1; j < accesses.size(); ++j) {
          const auto& [a, aw] = accesses[i];
          const auto& [b, bw] = accesses[j];
          if (a->thread_id == b->thread_id || !(aw || bw) || !overlaps(*a, *b)) continue;
          std::vector<MethodRef> subject{{a->method, a->instance_index}, {b->method, b->instance_index}};
          std::sort(subject.begin(), subject.end());
          Predicate p{canonical_id(PredicateKind::DataRace, subject, obj), PredicateKind::DataRace,
                      subject, obj, {}, true};
          emitter.emit(std::move(p), {std::max(a->t_start, b->t_start), std::min(a->t_end, b->t_end)});
        }
      }
    }

    if (options.add_failure_predicate && run.failed()) {
      Nanos end = std::numeric_limits<Nanos>::min();
      for (const auto& e : trace) end = std::max(end, e.t_end);
      emitter.emit({PredicateId(kFailureId), PredicateKind::Custom, {}, {}, {}, true}, {end, end});
    }
    out.runs.push_back(std::move(run));
  }

  for (auto& [id, p] : catalog) out.predicates.push_back(std::move(p));
  return out;
}

std::optional<TimeWindow> evaluate_compound(const std::vector<PredicateId>& conjuncts,
                                            const ExecutionRun& run) {
  if (conjuncts.empty()) throw Error("compound predicate with no conjuncts");
  TimeWindow w{std::numeric_limits<Nanos>::min(), std::numeric_limits<Nanos>::min()};
  for (const auto& c : conjuncts) {
    auto it = run.observations.find(c);
    if (it == run.observations.end()) return std::nullopt;
    w.start = std::max(w.start, it->second.start);
    w.end = std::max(w.end, it->second.end);
  }
  return w;
}

void apply_compound(const Predicate& compound, std::vector<ExecutionRun>& runs) {
  if (compound.kind != PredicateKind::CompoundConjunction)
    throw Error(compound.id + " is not a compound predicate");
  if (std::find(compound.conjuncts.begin(), compound.conjuncts.end(), compound.id) !=
      compound.conjuncts.end())
    throw Error(compound.id + " refers to itself");
  for (auto& run : runs)
    if (auto w = evaluate_compound(compound.conjuncts, run)) run.observe(compound.id, *w);
}

}  // namespace aid
