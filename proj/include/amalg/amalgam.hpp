#ifndef AMALG_AMALGAM_HPP
#define AMALG_AMALGAM_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amalg/extension.hpp"
#include "amalg/mu.hpp"
#include "amalg/structure.hpp"

namespace amalg {

enum class AmalgamException { kMaxFamily, kNegativeY, kGDrop };

std::string to_string(AmalgamException e);

/**
 * Certificate attached to an amalgamation exception:
 *  - kMaxFamily: base + tmpl + family = the saturating disjoint family in B2.
 *  - kNegativeY: y_set = Y with delta(Y | reduced language / A) < 0.
 *  - kGDrop: base + tmpl where the g value dropped across the join,
 *    g_before/g_after as capped comparisons.
 */
struct AmalgamCertificate {
  std::vector<Vertex> base;
  std::optional<ExtensionTemplate> tmpl;
  std::vector<std::vector<Vertex>> family;
  std::vector<Vertex> y_set;
  std::string detail;
};

struct AmalgamOutcome {
  std::optional<FinStructure> result;
  std::optional<AmalgamException> exception;
  AmalgamCertificate certificate;
  // vertex map B1 -> result (identity on A), present whenever result is
  std::map<Vertex, Vertex> embedding;

  bool accepted() const { return result.has_value(); }
};

/**
 * One minimal strong step in a decomposition of A <= B: either a single
 * point unrelated to everything before it, or a simply algebraic extension
 * with no proper intermediate strong set.
 */
struct StrongStep {
  std::vector<Vertex> added;  // vertices joined at this step (sorted)
  bool free_point = false;    // true when |added| == 1 with no new edges
};

/**
 * Decomposes a strong extension A <= B (inside s) into minimal steps
 * A = C0 <= C1 <= ... <= Cr = B.  Step choice is deterministic: among
 * minimal strong intermediate extensions choose the smallest, then
 * lexicographically least vertex set.  Throws if A is not strong in B.
 */
std::vector<StrongStep> decompose_strong(const FinStructure& s,
                                         std::span<const Vertex> a,
                                         std::span<const Vertex> b);

/**
 * Algebraic amalgamation: b1 and b2 are structures overlapping exactly in
 * the sorted vertex set a, with b1 \ a simply algebraic over a.  Builds the
 * free join E and reports membership: E in class, or one of the exception
 * cases with certificate.  Detection order: kNegativeY, kGDrop, kMaxFamily.
 * The embedding maps b1's vertices into E (fresh ids above b2's max where
 * they collide).
 */
AmalgamOutcome algebraic_amalgamate(std::span<const Vertex> a, const FinStructure& b1,
                                    const FinStructure& b2, const MuSnapshot& snap);

/**
 * Strong amalgamation of A <= B1 with A <= B2 over the shared sorted set a.
 * Always succeeds on class members: decomposes B1 over A into minimal
 * steps, free-joins each, and on a kMaxFamily exception reuses the
 * lexicographically least existing copy in the host.  Returns the amalgam D
 * with B2 <= D and the (possibly non-injective) map g : B1 -> D, identity
 * on A, with g(B1) <= D.
 */
struct StrongAmalgamResult {
  FinStructure amalgam;
  std::map<Vertex, Vertex> g;  // B1 -> amalgam
  int reused_copies = 0;       // number of kMaxFamily reuse events
  std::vector<std::string> trace;
};

StrongAmalgamResult strong_amalgamate(std::span<const Vertex> a, const FinStructure& b1,
                                      const FinStructure& b2, const MuSnapshot& snap);

}  // namespace amalg

#endif  // AMALG_AMALGAM_HPP
