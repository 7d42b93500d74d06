#ifndef AMALG_EXTENSION_HPP
#define AMALG_EXTENSION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amalg/mu.hpp"
#include "amalg/structure.hpp"

namespace amalg {

/**
 * B is simply algebraic over A inside s: disjoint, A strong in A u B,
 * delta(B/A) = 0, and no proper non-empty sub-extension has increment 0.
 * Both judged in the induced substructure on A u B.
 */
bool is_simply_algebraic(const FinStructure& s, std::span<const Vertex> a,
                         std::span<const Vertex> b);

struct MsaWitness {
  std::vector<Vertex> base;
  std::vector<Vertex> extension;
  ExtensionTemplate tmpl;
};

/**
 * The minimal sub-base F of A over which B is minimally simply algebraic;
 * nullopt when B is not simply algebraic over A at all.
 */
std::optional<MsaWitness> msa_base(const FinStructure& s, std::span<const Vertex> a,
                                   std::span<const Vertex> b);

struct MatchOptions {
  /** Require tp_qf(anchor) to equal the template's base type exactly.  The
   *  class-membership bound counts families this way; the definitional
   *  R_i expansion counts bare link-pattern matches instead. */
  bool check_base_type = true;
};

/**
 * The extension tuple b over the anchor tuple a is "of the form" of the
 * template: matching base type (see options) and relative type containing
 * the template's link edges under the tuple correspondence.
 */
bool matches_form(const FinStructure& s, std::span<const Vertex> a,
                  std::span<const Vertex> b, const ExtensionTemplate& t,
                  const MatchOptions& opts = {});

struct FamilyCount {
  std::vector<Vertex> base;
  long long count = 0;
  std::vector<std::vector<Vertex>> witnesses;  // pairwise disjoint match sets
};

/**
 * Exact maximum number of pairwise-disjoint template matches over the given
 * anchor tuple (all matches disjoint from the anchor).  Branch-and-bound
 * over the deduplicated match sets.
 */
FamilyCount max_disjoint_family(const FinStructure& s, std::span<const Vertex> a,
                                const ExtensionTemplate& t,
                                const MatchOptions& opts = {});

struct ClassViolation {
  enum class Kind { kNegativeDelta, kZeta, kMuBound };
  Kind kind;
  std::vector<Vertex> negative_set;              // kNegativeDelta
  std::optional<std::pair<Edge, Edge>> zeta_pair;  // kZeta
  std::vector<Vertex> base;                      // kMuBound
  std::optional<ExtensionTemplate> tmpl;         // kMuBound
  std::vector<std::vector<Vertex>> family;       // kMuBound
  long long bound = 0;                           // the violated mu value
  std::string describe() const;
};

struct ClassVerdict {
  bool accepted = true;
  std::optional<ClassViolation> violation;
};

struct InClassOptions {
  /** Cap on candidate msa extension size during form enumeration; <= 0 means
   *  |S| (full).  A violating family's template must itself be realized as
   *  an msa configuration of size <= cap somewhere in S. */
  int ext_size_cap = 0;
  /** Extra templates to audit on top of the realized forms (used by the
   *  builder to check its active catalog against arbitrary bases). */
  std::vector<ExtensionTemplate> extra_templates;
  /** Abort knob for pathological inputs; counts msa candidate expansions. */
  long long work_budget = 200'000'000;
  /** Audit only extra_templates (skip realized-form enumeration); used at
   *  scales where connected-subset enumeration is infeasible. */
  bool catalog_only = false;
};

/**
 * Membership in the amalgamation class at the given snapshot: hereditary
 * delta >= 0, the no-subsumption condition, and every disjoint same-form
 * family within its mu bound.  REJECT carries a certificate.
 */
ClassVerdict in_class(const FinStructure& s, const MuSnapshot& snap,
                      const InClassOptions& opts = {});

/**
 * All minimally-simply-algebraic configurations (base, extension) realized
 * in s with extension size <= cap (<= 0: unbounded), deduplicated as
 * vertex-set pairs; enumeration order is deterministic.
 */
std::vector<MsaWitness> enumerate_msa_configs(const FinStructure& s, int ext_size_cap,
                                              long long work_budget = 200'000'000);

std::string verdict_to_json_string(const ClassVerdict& v, bool pretty = false);

}  // namespace amalg

#endif  // AMALG_EXTENSION_HPP
