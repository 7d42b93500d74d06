#ifndef AMALG_GADGETS_HPP
#define AMALG_GADGETS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amalg/mu.hpp"
#include "amalg/structure.hpp"

namespace amalg {

/**
 * A named finite structure with a distinguished base tuple; the extension is
 * the rest of the vertex set.  Conversion to an ExtensionTemplate reads off
 * the relative type of the extension over the base.
 */
struct Gadget {
  std::string name;
  FinStructure structure;
  std::vector<Vertex> base;  // ordered
  std::vector<Vertex> ext;   // ordered

  ExtensionTemplate as_template() const;
};

/**
 * The dimension-dropping gadget D_t over base {a_1..a_k, g, h} with new
 * points B = {b_1..b_2t}.  All edges use the single ternary symbol 0:
 * {b_i, a_i, b_{i+1}} for 0 < i <= t and t < i < 2t (a-index taken mod k),
 * the closing edge {b_2t, g, b_1}, and the chord {b_1, h, b_{t+1}}.
 * Requires t > k >= 2.  delta(B / base) = -1.
 */
Gadget build_D(int k, int t, int n = 1);

/**
 * The unblockable gadget D-hat_t over base {a_1..a_k, g} with the full
 * 2t-cycle {b_i, a_i, b_{i+1}} for 1 <= i < 2t plus {b_2t, g, b_1}; 2t
 * edges on symbol 0, delta(B / base) = 0; minimally simply algebraic over
 * the base.  Requires t > k+1, k >= 2.
 */
Gadget build_D_hat(int k, int t, int n = 1);

enum class PathKind { P, H, L };

/**
 * Generalized paths on {a_1..a_k} with consecutive-triple edges
 * {a_i, a_{i+1}, a_{i+2}}: P has base {a_1, a_k} (k >= 3); H adds the edge
 * {a_{k-1}, a_k, a_1} and has base {a_1} (k >= 4); L also adds
 * {a_k, a_1, a_2} and has empty base (k >= 5).
 */
Gadget build_path(PathKind kind, int k, int n = 1);

/**
 * The i-th entry of the fixed recursive template enumeration used by the
 * schedule: the D-hat family with k = n+1 and t = n+3+i; base size n+2,
 * extension size 2(n+3+i), edges over symbol 0 only.  Pairwise
 * non-isomorphic across i.
 */
ExtensionTemplate omega(long long i, int n);

struct UnblockReport {
  bool ok = true;
  long long hosts_checked = 0;
  long long anchors_checked = 0;
  // first counterexample, if any
  std::optional<FinStructure> bad_host;
  std::vector<Vertex> bad_anchor;
  std::string detail;
};

/**
 * Desk-scale unblockability check: for every class member Z up to
 * host_size_bound vertices (symbol 0 support) and every anchor in Z matching
 * the template base type, either the free join of the template onto the
 * anchor stays in the class or Z already holds the full mu-bound of disjoint
 * copies.  The snapshot must be 3-permissive.
 */
UnblockReport verify_unblockable(const ExtensionTemplate& t, const MuSnapshot& snap,
                                 int host_size_bound);

/**
 * Attaches D_t freely over the ordered tuple c (length k+2, k = |c|-2) of
 * m; new vertices are allocated above m's max id.  Returns the extended
 * structure.  Dimension-drop law: delta(X, result) = delta(X, m) unless
 * some superset of X u c attains delta(X, m), in which case it drops by 1.
 */
FinStructure attach_D(const FinStructure& m, std::span<const Vertex> c, int t);

/**
 * Corollary-style dimension drop for a short tuple b (|b| <= 4, positive
 * dim): pads b with 4-|b| fresh isolated points and applies attach_D
 * consecutively 5-|b| times with parameters t, t+1, ....  Returns the new
 * structure.
 */
FinStructure drop_dimension(const FinStructure& m, std::span<const Vertex> b, int t);

}  // namespace amalg

#endif  // AMALG_GADGETS_HPP
