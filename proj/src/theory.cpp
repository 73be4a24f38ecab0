#include "aid/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

#include "aid/error.hpp"

namespace aid::theory {

namespace {

std::vector<std::vector<std::size_t>> components(const std::vector<std::size_t>& nodes, bool comparable,
                                                 const AcmGraph& g) {
  std::vector<std::size_t> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      bool rel = g.reaches(nodes[a], nodes[b]) || g.reaches(nodes[b], nodes[a]);
      if (rel == comparable) parent[find(a)] = find(b);
    }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> slot(nodes.size(), SIZE_MAX);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    auto r = find(a);
    if (slot[r] == SIZE_MAX) {
      slot[r] = out.size();
      out.emplace_back();
    }
    out[slot[r]].push_back(nodes[a]);
  }
  return out;
}

BigInt count_chains(const AcmGraph& g, const std::vector<std::size_t>& nodes) {
  if (nodes.empty()) return 1;
  if (nodes.size() == 1) return 2;
  auto parallel = components(nodes, true, g);
  if (parallel.size() > 1) {
    BigInt total = 1;
    for (const auto& c : parallel) total += count_chains(g, c) - 1;
    return total;
  }
  auto series = components(nodes, false, g);
  if (series.size() > 1) {
    BigInt total = 1;
    for (const auto& c : series) total *= count_chains(g, c);
    return total;
  }
  std::string listing;
  for (auto v : nodes) listing += (listing.empty() ? "" : ",") + g.id(v);
  throw Error("graph is not series-parallel: {" + listing + "} splits neither in series nor in parallel");
}

}  // namespace

BigInt search_space_cpd(const AcmGraph& g, const std::vector<std::size_t>& nodes) {
  return count_chains(g, nodes);
}

BigInt search_space_cpd(const AcmGraph& g) {
  std::vector<std::size_t> nodes;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (v != g.failure()) nodes.push_back(v);
  return count_chains(g, nodes);
}

BigInt search_space_symmetric(std::uint64_t J, std::uint64_t B, std::uint64_t n) {
  BigInt per_junction = BigInt(B) * ((BigInt(1) << n) - 1) + 1;
  return boost::multiprecision::pow(per_junction, static_cast<unsigned>(J));
}

BigInt search_space_gt(std::uint64_t N) { return BigInt(1) << N; }

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double log2_big(const BigInt& x) {
  if (x <= 0) throw Error("log2 of a non-positive number");
  auto bits = boost::multiprecision::msb(x);
  if (bits < 1000) return std::log2(x.convert_to<double>());
  auto shift = bits - 60;
  BigInt top = x >> shift;
  return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

double lower_bound_gt(std::uint64_t N, std::uint64_t D) {
  if (D > N) throw Error("D must not exceed N");
  return log2_big(binomial(N, D));
}

double lower_bound_cpd(std::uint64_t N, std::uint64_t D, double S1) {
  if (D == 0 || D > N) throw Error("lower bound needs 0 < D <= N");
  if (S1 < 0) throw Error("S1 must be non-negative");
  double factor = static_cast<double>(N) / (static_cast<double>(N) + static_cast<double>(D) * S1);
  return factor * lower_bound_gt(N, D);
}

UpperBounds upper_bounds(const BoundInputs& in) {
  auto lg = [](std::uint64_t x) { return x > 0 ? std::log2(static_cast<double>(x)) : 0.0; };
  double D = static_cast<double>(in.D);
  UpperBounds u;
  u.aid_branch = static_cast<double>(in.J) * lg(in.T) + D * lg(in.N_M);
  u.tagt_branch = D * lg(in.T) + D * lg(in.N_M);
  u.tagt = D * lg(in.N);
  u.thm4 = in.N > 0 ? u.tagt - D * (D - 1) * in.S2 / (2.0 * static_cast<double>(in.N)) : 0.0;
  u.j_below_d = in.J < in.D;
  u.aid_branch_below_tagt = u.aid_branch < u.tagt_branch;
  return u;
}

std::vector<SymmetricRow> symmetric_table(std::uint64_t J, std::uint64_t B, std::uint64_t n, std::uint64_t D,
                                          double S1, double S2) {
  const std::uint64_t N = J * B * n;
  const double lgB = std::log2(static_cast<double>(B));
  const double lgJn = std::log2(static_cast<double>(J * n));
  const double d = static_cast<double>(D);
  SymmetricRow cpd{"CPD", search_space_symmetric(J, B, n), lower_bound_cpd(N, D, S1),
                   static_cast<double>(J) * lgB + d * lgJn - d * (d - 1) * S2 / (2.0 * static_cast<double>(J * n))};
  SymmetricRow gt{"GT", search_space_gt(N), lower_bound_gt(N, D),
                  d * lgB + d * lgJn - d * (d - 1) / (2.0 * static_cast<double>(N))};
  return {cpd, gt};
}

AcmShape measure_shape(const AcmGraph& g) {
  AcmShape s;
  s.N = g.size() - 1;
  for (const auto& j : g.junctions()) {
    if (!j.split || j.outputs.size() < 2) continue;
    ++s.J;
    s.T = std::max(s.T, j.outputs.size());
  }
  s.T = std::max<std::size_t>(s.T, 1);
  for (std::size_t v = 0; v < g.size(); ++v)
    if (v != g.failure()) s.N_M = std::max(s.N_M, g.level(v) + 1);
  return s;
}

BoundCheckReport empirical_bound_check(const std::vector<InstanceMeasurement>& rows) {
  BoundCheckReport rep;
  for (const auto& r : rows) {
    BoundInputs in;
    in.N = r.shape.N;
    in.D = r.D;
    in.J = r.shape.J;
    in.T = r.shape.T;
    in.N_M = r.shape.N_M;
    auto u = upper_bounds(in);
    double aid_limit = u.aid_branch + static_cast<double>(r.D);
    double tagt_limit = u.tagt + static_cast<double>(r.D);
    ++rep.checked;
    if (static_cast<double>(r.aid) > aid_limit + 1e-9)
      rep.violations.push_back(r.label + ": AID used " + std::to_string(r.aid) + " > " + std::to_string(aid_limit));
    if (static_cast<double>(r.tagt) > tagt_limit + 1e-9)
      rep.violations.push_back(r.label + ": TAGT used " + std::to_string(r.tagt) + " > " + std::to_string(tagt_limit));
  }
  return rep;
}

namespace {

struct Piece {
  std::vector<std::size_t> nodes, sources, sinks;
};

Piece compose(std::size_t size, std::size_t& next, std::vector<std::pair<std::size_t, std::size_t>>& edges, Rng& rng) {
  if (size == 1) {
    auto v = next++;
    return {{v}, {v}, {v}};
  }
  std::uniform_int_distribution<std::size_t> split(1, size - 1);
  auto k = split(rng);
  bool series = std::bernoulli_distribution(0.5)(rng);
  auto a = compose(k, next, edges, rng);
  auto b = compose(size - k, next, edges, rng);
  Piece out;
  out.nodes = a.nodes;
  out.nodes.insert(out.nodes.end(), b.nodes.begin(), b.nodes.end());
  if (series) {
    for (auto u : a.sinks)
      for (auto v : b.sources) edges.emplace_back(u, v);
    out.sources = a.sources;
    out.sinks = b.sinks;
  } else {
    out.sources = a.sources;
    out.sources.insert(out.sources.end(), b.sources.begin(), b.sources.end());
    out.sinks = a.sinks;
    out.sinks.insert(out.sinks.end(), b.sinks.begin(), b.sinks.end());
  }
  return out;
}

}  // namespace

AcmGraph random_series_parallel(std::size_t size, Rng& rng) {
  if (size == 0) throw Error("series-parallel graph needs at least one predicate");
  std::size_t next = 0;
  std::vector<std::pair<std::size_t, std::size_t>> raw;
  auto piece = compose(size, next, raw, rng);
  std::vector<PredicateId> ids;
  for (std::size_t v = 0; v < size; ++v) ids.push_back("P" + std::to_string(v + 1));
  std::vector<std::pair<PredicateId, PredicateId>> edges;
  for (auto [u, v] : raw) edges.emplace_back(ids[u], ids[v]);
  for (auto s : piece.sinks) edges.emplace_back(ids[s], std::string(kFailureId));
  ids.push_back(std::string(kFailureId));
  return AcmGraph::from_edges(std::move(ids), edges, std::string(kFailureId));
}

}  // namespace aid::theory
