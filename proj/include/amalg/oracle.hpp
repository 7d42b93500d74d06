#ifndef AMALG_ORACLE_HPP
#define AMALG_ORACLE_HPP

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amalg/mu.hpp"
#include "amalg/structure.hpp"

namespace amalg {
namespace oracle {

// Default cap on |vertices| for full subset enumeration; overridable via
// the AMALG_EXHAUSTIVE_BOUND environment variable and per-call parameters.
int exhaustive_bound();

struct BruteMinDelta {
  int value = 0;
  std::vector<std::vector<Vertex>> minimizers;  // all minimizing supersets of A
};

/** Exact min over all A <= D <= S by full subset enumeration of S \ A. */
BruteMinDelta brute_min_delta(const FinStructure& s, std::span<const Vertex> a,
                              int bound = -1);

bool brute_is_strong(const FinStructure& s, std::span<const Vertex> a, int bound = -1);

std::vector<Vertex> brute_ss_closure(const FinStructure& s, std::span<const Vertex> a,
                                     int bound = -1);

/** Exact g by direct scan over m and witnesses X; nullopt when infinite. */
std::optional<int> brute_g_value(const FinStructure& s, std::span<const Vertex> a,
                                 int bound = -1);

/**
 * Exact maximum number of pairwise-disjoint copies of t's extension over the
 * fixed base tuple, by exhaustive packing over all embeddings.
 */
int brute_max_disjoint_family(const FinStructure& s, std::span<const Vertex> base,
                              const ExtensionTemplate& t, bool check_base_type = true);

/** Canonical relabeling of s onto {0..v-1}; isomorphic inputs map to equal outputs. */
FinStructure canonical_form(const FinStructure& s);

std::string canonical_key(const FinStructure& s);

struct EnumerationSpec {
  int vertex_budget = 0;          // exact vertex count
  std::vector<int> symbols;       // allowed edge symbols
  int n = 1;                      // signature parameter
  bool zeta_required = false;     // keep only zeta-compliant structures
  bool nonnegative_only = false;  // keep only structures with min delta >= 0
  const MuSnapshot* class_filter = nullptr;  // keep only class members
  int max_edges = -1;             // optional cap on edge count (-1: none)
};

/**
 * All isomorphism classes on exactly vertex_budget vertices meeting the
 * spec, each in canonical form, in a deterministic order.  Search proceeds
 * by edge count; min-delta pruning applies when nonnegative_only is set.
 */
std::vector<FinStructure> enumerate_structures(const EnumerationSpec& spec);

struct LemmaReport {
  bool pass = true;
  long long cases_checked = 0;
  std::string counterexample;  // empty when pass
  std::string detail;
};

/**
 * Exhaustive checker for a named statement over a small parameter domain.
 * Known ids: submodularity, closure-uniqueness, closure-monotone,
 * g-invariance, dt-zero-sets, dt-drop, dhat-msa, path-values, flat-wedge,
 * join-nonnegative.  Params are free-form key=value pairs (v, k, t, n...).
 * Unknown id -> throws std::invalid_argument.
 */
LemmaReport verify_lemma(const std::string& lemma_id,
                         const std::map<std::string, long long>& params);

std::vector<std::string> known_lemmas();

std::string report_to_json_string(const LemmaReport& r);

}  // namespace oracle
}  // namespace amalg

#endif  // AMALG_ORACLE_HPP
