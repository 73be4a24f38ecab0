#include "aid/predicate.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "aid/error.hpp"

namespace aid {

namespace {

constexpr std::array<std::pair<PredicateKind, std::string_view>, 7> kKindNames{{
    {PredicateKind::DataRace, "DataRace"},
    {PredicateKind::MethodFails, "MethodFails"},
    {PredicateKind::TooFast, "TooFast"},
    {PredicateKind::TooSlow, "TooSlow"},
    {PredicateKind::WrongReturn, "WrongReturn"},
    {PredicateKind::CompoundConjunction, "CompoundConjunction"},
    {PredicateKind::Custom, "Custom"},
}};

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string_view to_string(PredicateKind kind) {
  for (auto [k, name] : kKindNames)
    if (k == kind) return name;
  return "Custom";
}

PredicateKind parse_predicate_kind(std::string_view name) {
  for (auto [k, n] : kKindNames)
    if (n == name) return k;
  throw Error("unknown predicate kind '" + std::string(name) + "'");
}

std::string_view to_string(RunLabel label) {
  return label == RunLabel::Failure ? "failure" : "success";
}

RunLabel parse_run_label(std::string_view name) {
  if (name == "failure" || name == "Failure" || name == "fail") return RunLabel::Failure;
  if (name == "success" || name == "Success" || name == "pass") return RunLabel::Success;
  throw Error("unknown run label '" + std::string(name) + "'");
}

PredicateId canonical_id(PredicateKind kind, std::vector<MethodRef> subject,
                         std::string_view object) {
  std::sort(subject.begin(), subject.end());
  std::string id(to_string(kind));
  id += '(';
  for (std::size_t i = 0; i < subject.size(); ++i) {
    if (i) id += ',';
    id += subject[i].method;
    id += '#';
    id += std::to_string(subject[i].instance);
  }
  id += ')';
  if (!object.empty()) {
    id += '@';
    id += object;
  }
  return id;
}

Predicate make_compound(std::vector<PredicateId> conjuncts) {
  std::sort(conjuncts.begin(), conjuncts.end());
  conjuncts.erase(std::unique(conjuncts.begin(), conjuncts.end()), conjuncts.end());
  if (conjuncts.size() < 2)
    throw Error("compound predicate needs at least two distinct conjuncts");
  Predicate p;
  p.kind = PredicateKind::CompoundConjunction;
  p.id = "And(";
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    if (i) p.id += '&';
    p.id += conjuncts[i];
  }
  p.id += ')';
  p.conjuncts = std::move(conjuncts);
  return p;
}

void ExecutionRun::observe(const PredicateId& id, TimeWindow window) {
  if (window.start > window.end)
    throw Error("run " + run_id + ": inverted window for " + id);
  if (!observations.emplace(id, window).second)
    throw Error("run " + run_id + ": duplicate observation of " + id);
}

void to_json(nlohmann::json& j, const ObjectAccess& a) {
  j = {{"id", a.object}, {"mode", a.mode == AccessMode::Write ? "write" : "read"}};
}

void from_json(const nlohmann::json& j, ObjectAccess& a) {
  a.object = scalar_text(j.at("id"));
  auto mode = j.value("mode", std::string("read"));
  if (mode == "write") a.mode = AccessMode::Write;
  else if (mode == "read") a.mode = AccessMode::Read;
  else throw Error("unknown access mode '" + mode + "'");
}

void to_json(nlohmann::json& j, const MethodEvent& e) {
  j = {{"run_id", e.run_id},
       {"thread_id", e.thread_id},
       {"method", e.method},
       {"instance_index", e.instance_index},
       {"t_start", e.t_start},
       {"t_end", e.t_end},
       {"objects_accessed", e.objects_accessed},
       {"threw_exception", e.threw_exception}};
  if (e.return_value)
    j["return_value"] = nlohmann::json::parse(*e.return_value, nullptr, false).is_discarded()
                            ? nlohmann::json(*e.return_value)
                            : nlohmann::json::parse(*e.return_value);
  else
    j["return_value"] = nullptr;
}

void from_json(const nlohmann::json& j, MethodEvent& e) {
  e.run_id = scalar_text(j.at("run_id"));
  e.thread_id = scalar_text(j.at("thread_id"));
  e.method = j.at("method").get<std::string>();
  e.instance_index = j.at("instance_index").get<std::uint32_t>();
  e.t_start = j.at("t_start").get<Nanos>();
  e.t_end = j.at("t_end").get<Nanos>();
  if (e.t_start > e.t_end)
    throw Error("event " + e.method + " in run " + e.run_id + " ends before it starts");
  e.objects_accessed.clear();
  if (auto it = j.find("objects_accessed"); it != j.end())
    e.objects_accessed = it->get<std::vector<ObjectAccess>>();
  e.return_value.reset();
  if (auto it = j.find("return_value"); it != j.end() && !it->is_null())
    e.return_value = it->dump();
  e.threw_exception = j.value("threw_exception", false);
}

void to_json(nlohmann::json& j, const Predicate& p) {
  nlohmann::json subject = nlohmann::json::array();
  for (const auto& m : p.subject) subject.push_back({{"method", m.method}, {"instance", m.instance}});
  j = {{"pred_id", p.id},
       {"kind", to_string(p.kind)},
       {"subject", subject},
       {"safe_to_intervene", p.safe_to_intervene}};
  if (!p.object.empty()) j["object"] = p.object;
  if (!p.conjuncts.empty()) j["conjuncts"] = p.conjuncts;
}

void from_json(const nlohmann::json& j, Predicate& p) {
  p.id = j.at("pred_id").get<std::string>();
  p.kind = parse_predicate_kind(j.value("kind", std::string("Custom")));
  p.subject.clear();
  for (const auto& m : j.value("subject", nlohmann::json::array()))
    p.subject.push_back({m.at("method").get<std::string>(), m.value("instance", 1u)});
  p.object = j.value("object", std::string());
  p.conjuncts = j.value("conjuncts", std::vector<PredicateId>{});
  p.safe_to_intervene = j.value("safe_to_intervene", true);
}

void to_json(nlohmann::json& j, const ExecutionRun& r) {
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& [id, w] : r.observations)
    obs.push_back({{"pred_id", id}, {"t_start", w.start}, {"t_end", w.end}});
  j = {{"run_id", r.run_id}, {"label", to_string(r.label)}, {"observations", obs}};
}

void from_json(const nlohmann::json& j, ExecutionRun& r) {
  r.run_id = scalar_text(j.at("run_id"));
  r.label = parse_run_label(j.at("label").get<std::string>());
  r.observations.clear();
  for (const auto& o : j.value("observations", nlohmann::json::array()))
    r.observe(o.at("pred_id").get<std::string>(),
              {o.at("t_start").get<Nanos>(), o.at("t_end").get<Nanos>()});
}

}  // namespace aid
