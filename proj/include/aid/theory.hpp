#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aid/acm.hpp"
#include "aid/random.hpp"

namespace aid::theory {

using BigInt = boost::multiprecision::cpp_int;

/// Symbols used by the bounds. For the symmetric ACM N = J·B·n.
struct BoundInputs {
  std::uint64_t N = 0;
  std::uint64_t D = 0;
  double S1 = 0;
  double S2 = 0;
  std::uint64_t J = 0;
  std::uint64_t B = 0;
  std::uint64_t n = 0;
  std::uint64_t T = 0;
  std::uint64_t N_M = 0;
};

/// Number of candidate causal sets: subsets of predicates (F excluded) that
/// are totally ordered by reachability. Evaluated by series/parallel
/// decomposition; throws Error when the graph does not decompose.
BigInt search_space_cpd(const AcmGraph& g);
/// Same count over an explicit node subset of `g`.
BigInt search_space_cpd(const AcmGraph& g, const std::vector<std::size_t>& nodes);

/// (B(2^n − 1) + 1)^J
BigInt search_space_symmetric(std::uint64_t J, std::uint64_t B, std::uint64_t n);
/// 2^N
BigInt search_space_gt(std::uint64_t N);

BigInt binomial(std::uint64_t n, std::uint64_t k);
double log2_big(const BigInt& x);

/// log₂ C(N, D)
double lower_bound_gt(std::uint64_t N, std::uint64_t D);
/// N / (N + D·S1) · log₂ C(N, D). Throws when D is 0 or exceeds N.
double lower_bound_cpd(std::uint64_t N, std::uint64_t D, double S1);

struct UpperBounds {
  double aid_branch = 0;   // J log T + D log N_M
  double tagt_branch = 0;  // D log T + D log N_M
  double thm4 = 0;         // D log N − D(D−1)S2 / (2N)
  double tagt = 0;         // D log N
  bool j_below_d = false;
  bool aid_branch_below_tagt = false;
};

UpperBounds upper_bounds(const BoundInputs& in);

struct SymmetricRow {
  std::string approach;  // "CPD" or "GT"
  BigInt search_space;
  double lower = 0;
  double upper = 0;
};

/// Both rows of the comparison for the symmetric ACM with J junctions, B
/// branches each and n predicates per branch.
std::vector<SymmetricRow> symmetric_table(std::uint64_t J, std::uint64_t B, std::uint64_t n, std::uint64_t D,
                                          double S1, double S2);

/// Structural quantities of an ACM: N predicates, J split junctions, T the
/// widest split, N_M the most predicates on one path (F excluded).
struct AcmShape {
  std::size_t N = 0;
  std::size_t J = 0;
  std::size_t T = 0;
  std::size_t N_M = 0;
};

AcmShape measure_shape(const AcmGraph& g);

/// One discovery run to hold against the upper bounds.
struct InstanceMeasurement {
  std::string label;
  std::size_t D = 0;
  AcmShape shape;
  std::size_t aid = 0;
  std::size_t tagt = 0;
};

struct BoundCheckReport {
  std::size_t checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// AID ≤ J log T + D log N_M + D and TAGT ≤ D log N + D on every instance
/// (the trailing D absorbs rounding up of each halving).
BoundCheckReport empirical_bound_check(const std::vector<InstanceMeasurement>& rows);

/// Random series-parallel DAG over `size` predicates built from single nodes
/// by series and parallel composition, with every sink wired to F.
AcmGraph random_series_parallel(std::size_t size, Rng& rng);

}  // namespace aid::theory
