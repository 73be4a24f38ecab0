#include "aid/sd_filter.hpp"

#include <algorithm>
#include <cstdio>

#include "aid/error.hpp"

namespace aid {

double PredicateStats::precision() const {
  auto with = n_failed_with + n_success_with;
  return with ? static_cast<double>(n_failed_with) / static_cast<double>(with) : 0.0;
}

double PredicateStats::recall() const {
  return n_failed_total ? static_cast<double>(n_failed_with) / static_cast<double>(n_failed_total) : 0.0;
}

StatsTable compute_stats(const std::vector<ExecutionRun>& runs) {
  auto n_failed = static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const auto& r) { return r.failed(); }));
  if (n_failed == 0) throw Error("no failed runs in the predicate logs; recall is undefined");

  StatsTable table;
  for (const auto& run : runs) {
    for (const auto& [id, window] : run.observations) {
      auto& s = table[id];
      s.pred_id = id;
      s.n_failed_total = n_failed;
      if (run.failed()) ++s.n_failed_with;
      else ++s.n_success_with;
    }
  }
  return table;
}

std::set<PredicateId> fully_discriminative(const StatsTable& stats, const PredicateCatalog& catalog) {
  std::set<PredicateId> out;
  for (const auto& [id, s] : stats) {
    if (!s.fully_discriminative()) continue;
    auto it = catalog.find(id);
    if (it != catalog.end() && !it->second.safe_to_intervene) continue;
    out.insert(id);
  }
  return out;
}

std::string stats_csv(const StatsTable& stats, const std::set<PredicateId>& selected) {
  std::string out = "pred_id,n_failed_with,n_success_with,n_failed_total,precision,recall,selected\n";
  char buf[64];
  for (const auto& [id, s] : stats) {
    bool quote = id.find_first_of(",\"") != std::string::npos;
    if (quote) {
      out += '"';
      for (char c : id) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
      out += '"';
    } else {
      out += id;
    }
    std::snprintf(buf, sizeof buf, ",%zu,%zu,%zu,%.6f,%.6f,%d\n", s.n_failed_with, s.n_success_with,
                  s.n_failed_total, s.precision(), s.recall(), selected.contains(id) ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace aid
