#ifndef AMALG_STRUCTURE_HPP
#define AMALG_STRUCTURE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amalg {

using Vertex = int;

/**
 * Relational signature: one ternary symbol (index 0) plus auxiliary symbols
 * 1, 2, ... of arity n + 2, where n >= 1 is the global spectrum parameter.
 * All relations are symmetric and hold of sets of distinct vertices, so an
 * atomic fact is stored once as a sorted vertex set.
 */
struct Signature {
  int n = 1;

  int arity(int symbol) const { return symbol == 0 ? 3 : n + 2; }
};

/** One atomic fact: a symbol together with the sorted set of its vertices. */
struct Edge {
  int symbol = 0;
  std::vector<Vertex> verts;  // sorted, pairwise distinct

  friend bool operator==(const Edge& a, const Edge& b) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) = default;
};

/** Sorted-vector set helpers used throughout; all inputs must be sorted. */
namespace vset {
std::vector<Vertex> sorted(std::vector<Vertex> v);
bool is_sorted_set(std::span<const Vertex> v);
bool contains(std::span<const Vertex> set, Vertex v);
bool is_subset(std::span<const Vertex> a, std::span<const Vertex> b);
std::vector<Vertex> set_union(std::span<const Vertex> a, std::span<const Vertex> b);
std::vector<Vertex> set_intersection(std::span<const Vertex> a, std::span<const Vertex> b);
std::vector<Vertex> set_difference(std::span<const Vertex> a, std::span<const Vertex> b);
bool disjoint(std::span<const Vertex> a, std::span<const Vertex> b);
}  // namespace vset

/**
 * A finite structure in the signature above.  Vertices are arbitrary
 * non-negative ids; edges are stored sorted and deduplicated.  The
 * predimension of a vertex set X is delta(X) = |X| - #(edges inside X).
 */
class FinStructure {
 public:
  explicit FinStructure(int n = 1);

  int n() const { return sig_.n; }
  const Signature& signature() const { return sig_; }
  int arity(int symbol) const { return sig_.arity(symbol); }

  const std::vector<Vertex>& vertices() const { return verts_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return verts_.size(); }
  bool empty() const { return verts_.empty(); }

  bool has_vertex(Vertex v) const;
  bool has_edge(const Edge& e) const;
  bool has_edge(int symbol, std::span<const Vertex> verts) const;

  void add_vertex(Vertex v);
  Vertex add_fresh_vertex();
  Vertex max_vertex() const;  // -1 when empty

  /**
   * Adds the fact symbol(verts).  Throws std::invalid_argument if the arity
   * is wrong, the vertices are not pairwise distinct, or some vertex is
   * missing from the structure.  Re-adding an existing edge is a no-op.
   */
  void add_edge(int symbol, std::vector<Vertex> verts);
  void remove_edge(const Edge& e);  // throws if absent

  int max_symbol() const;  // largest symbol index used; -1 when no edges

  /** Number of edges whose vertex set lies entirely inside X. */
  long long edge_count_inside(std::span<const Vertex> x) const;

  /** delta(X) = |X| - #edges inside X.  X must consist of member vertices. */
  long long delta(std::span<const Vertex> x) const;
  long long delta() const;  // delta of the whole vertex set

  /** delta(B / A) = delta(A u B) - delta(A); B and A need not be disjoint. */
  long long delta_rel(std::span<const Vertex> b, std::span<const Vertex> a) const;

  /** Induced substructure on X (edges fully inside X). */
  FinStructure restrict_to(std::span<const Vertex> x) const;

  /** Reduct keeping only symbols with index < symbol_bound. */
  FinStructure reduct_below(int symbol_bound) const;

  /** Edge indices incident to v (indices into edges()). */
  std::vector<int> edges_at(Vertex v) const;

 private:
  Signature sig_;
  std::vector<Vertex> verts_;
  std::vector<Edge> edges_;
};

/**
 * Relative quantifier-free type of an extension: the ordered base tuple, the
 * ordered extension tuple, the edges internal to the base (the base type
 * constraint) and the link edges (edges meeting the extension).
 */
struct ExtensionTemplate {
  FinStructure pattern;       // structure on base + ext with internal + link edges
  std::vector<Vertex> base;   // ordered, distinct
  std::vector<Vertex> ext;    // ordered, distinct, disjoint from base

  std::vector<Edge> link_edges() const;   // edges of pattern meeting ext
  std::vector<Edge> base_edges() const;   // edges of pattern inside base
  std::vector<int> sublanguage() const;   // symbols occurring in link edges
};

/**
 * Reads off the extension template of ext over base inside s: base-internal
 * edges plus every edge of s that meets ext and lies inside base u ext.
 * Both tuples must consist of distinct member vertices and be disjoint.
 */
ExtensionTemplate rel_qf_type(const FinStructure& s, std::vector<Vertex> base,
                              std::vector<Vertex> ext);

/** Template isomorphism: some bijection base->base, ext->ext matching link
 *  edges exactly.  When strict_base is true, base-internal edges must match
 *  exactly as well. */
bool templates_isomorphic(const ExtensionTemplate& a, const ExtensionTemplate& b,
                          bool strict_base = true);

/**
 * Free join of s1 and s2 over their common part: vertex sets may overlap
 * exactly in `common`, edges are unioned, and no new edge crosses the
 * overlap.  Throws std::invalid_argument if the overlap is not exactly
 * `common` or the two sides disagree on edges inside it.
 */
FinStructure free_join(const FinStructure& s1, const FinStructure& s2,
                       std::span<const Vertex> common);

/** Copy of s with vertices renamed by `map` (must be injective and total). */
FinStructure relabel(const FinStructure& s, const std::map<Vertex, Vertex>& map);

/**
 * No-subsumption check: rejects when the vertex set of one edge contains the
 * vertex set of another edge with a different symbol (equal sets with equal
 * symbols are a single stored fact and are fine).
 */
struct ZetaReport {
  bool ok = true;
  std::optional<std::pair<Edge, Edge>> violation;  // (outer, inner)
};
ZetaReport zeta_check(const FinStructure& s);

/**
 * Streams every injective map g extending `anchor` that sends `pattern`
 * vertices to `host` vertices such that each pattern edge lands on a host
 * edge (host may have extra edges).  The callback returns false to stop.
 */
void find_embeddings(const FinStructure& pattern, const FinStructure& host,
                     const std::map<Vertex, Vertex>& anchor,
                     const std::function<bool(const std::map<Vertex, Vertex>&)>& cb);

// --- serialization ---------------------------------------------------------

std::string to_json_string(const FinStructure& s, bool pretty = false);
FinStructure structure_from_json_string(const std::string& text);
FinStructure structure_from_json_file(const std::string& path);
void structure_to_json_file(const FinStructure& s, const std::string& path);

/** GraphViz rendering: round vertex nodes, one labelled box node per edge. */
std::string to_dot(const FinStructure& s, const std::string& name = "s");

}  // namespace amalg

#endif  // AMALG_STRUCTURE_HPP
