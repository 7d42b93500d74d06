#ifndef AMALG_CLOSURE_HPP
#define AMALG_CLOSURE_HPP

#include <optional>
#include <span>
#include <vector>

#include "amalg/structure.hpp"

namespace amalg {

/**
 * Predimension of A inside s: min delta(D) over all A <= D <= vertex set.
 * Computed exactly by a max-flow reduction (selecting an edge pays for its
 * vertices outside A), so it scales to structures far beyond subset
 * enumeration.
 */
long long min_delta_over_supersets(const FinStructure& s, std::span<const Vertex> a);

/** The unique smallest D >= A attaining min_delta_over_supersets. */
std::vector<Vertex> min_delta_witness(const FinStructure& s, std::span<const Vertex> a);

/** A is strong (self-sufficient) in s iff delta(A) equals the min above. */
bool is_strong(const FinStructure& s, std::span<const Vertex> a);

struct ClosureReport {
  std::vector<Vertex> closure;
  long long delta_value = 0;                       // delta(closure) = dim of A
  std::vector<std::vector<Vertex>> witness_chain;  // input, then closure
};

/**
 * Self-sufficient closure: the unique smallest strong superset of A in s.
 * It coincides with the smallest delta-minimizing superset.
 */
ClosureReport ss_closure(const FinStructure& s, std::span<const Vertex> a);

/** dim(A) = delta(ss_closure(A)). */
long long dim(const FinStructure& s, std::span<const Vertex> a);

struct GValue {
  bool finite = false;
  long long value = 0;  // meaningful when finite
  std::vector<Vertex> witness;  // a set X >= A with |X| <= |A|+value showing
                                // non-strength in the reduct below `value`
  static GValue infinite() { return GValue{}; }
  static GValue of(long long m, std::vector<Vertex> x) { return GValue{true, m, std::move(x)}; }
};

/**
 * g_s(A): the least m such that some X >= A with |X| <= |A| + m witnesses
 * that A is not strong using only relation symbols with index < m; infinite
 * when A is strong in every such bounded reduct.  Exact; the search is
 * bounded by |s| - |A| + max_symbol + 1, beyond which no new witness can
 * appear.  Suitable for small structures (exhaustive in the witness size).
 */
GValue g_value(const FinStructure& s, std::span<const Vertex> a);

/**
 * Capped variant for large structures: returns g_s(A) when it is < cap and
 * nullopt when g_s(A) >= cap (including infinite).  All downstream decisions
 * (threshold comparisons against schedule codes) only need the capped value.
 * Uses the max-flow strength test per reduct plus a bounded witness search.
 */
std::optional<long long> g_value_below(const FinStructure& s, std::span<const Vertex> a,
                                       long long cap);

enum class EmptyFamilyConvention {
  kClosureOfUnion,  // E_empty := ss_closure(union of the E_i)
  kWholeStructure,  // E_empty := the full vertex set
};

/**
 * Inclusion-exclusion defect sum((-1)^|ss| dim(E_ss)) over subsets ss of the
 * index set, where E_ss is the intersection of the chosen closed sets and
 * the empty intersection is fixed by `convention`.  Flatness of the ambient
 * geometry is the statement that this is always <= 0.  Each E_i must be
 * closed (strong) in s.
 */
long long flatness_defect(const FinStructure& s,
                          const std::vector<std::vector<Vertex>>& closed_sets,
                          EmptyFamilyConvention convention =
                              EmptyFamilyConvention::kClosureOfUnion);

}  // namespace amalg

#endif  // AMALG_CLOSURE_HPP
