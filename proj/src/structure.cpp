#include "amalg/structure.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace amalg {

namespace vset {

std::vector<Vertex> sorted(std::vector<Vertex> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool is_sorted_set(std::span<const Vertex> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i]) return false;
  return true;
}

bool contains(std::span<const Vertex> set, Vertex v) {
  return std::binary_search(set.begin(), set.end(), v);
}

bool is_subset(std::span<const Vertex> a, std::span<const Vertex> b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<Vertex> set_union(std::span<const Vertex> a, std::span<const Vertex> b) {
  std::vector<Vertex> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Vertex> set_intersection(std::span<const Vertex> a, std::span<const Vertex> b) {
  std::vector<Vertex> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Vertex> set_difference(std::span<const Vertex> a, std::span<const Vertex> b) {
  std::vector<Vertex> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool disjoint(std::span<const Vertex> a, std::span<const Vertex> b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else
      return false;
  }
  return true;
}

}  // namespace vset

FinStructure::FinStructure(int n) {
  if (n < 1) throw std::invalid_argument("spectrum parameter n must be >= 1");
  sig_.n = n;
}

bool FinStructure::has_vertex(Vertex v) const { return vset::contains(verts_, v); }

bool FinStructure::has_edge(const Edge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

bool FinStructure::has_edge(int symbol, std::span<const Vertex> verts) const {
  Edge e{symbol, std::vector<Vertex>(verts.begin(), verts.end())};
  std::sort(e.verts.begin(), e.verts.end());
  return has_edge(e);
}

void FinStructure::add_vertex(Vertex v) {
  if (v < 0) throw std::invalid_argument("vertex ids must be non-negative");
  auto it = std::lower_bound(verts_.begin(), verts_.end(), v);
  if (it != verts_.end() && *it == v) return;
  verts_.insert(it, v);
}

Vertex FinStructure::add_fresh_vertex() {
  Vertex v = max_vertex() + 1;
  verts_.push_back(v);
  return v;
}

Vertex FinStructure::max_vertex() const { return verts_.empty() ? -1 : verts_.back(); }

void FinStructure::add_edge(int symbol, std::vector<Vertex> verts) {
  if (symbol < 0) throw std::invalid_argument("negative relation symbol");
  if (static_cast<int>(verts.size()) != arity(symbol))
    throw std::invalid_argument("edge arity mismatch for symbol " + std::to_string(symbol));
  std::sort(verts.begin(), verts.end());
  if (std::adjacent_find(verts.begin(), verts.end()) != verts.end())
    throw std::invalid_argument("edge vertices must be pairwise distinct");
  for (Vertex v : verts)
    if (!has_vertex(v))
      throw std::invalid_argument("edge uses vertex " + std::to_string(v) +
                                  " absent from the structure");
  Edge e{symbol, std::move(verts)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it != edges_.end() && *it == e) return;
  edges_.insert(it, std::move(e));
}

void FinStructure::remove_edge(const Edge& e) {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || !(*it == e))
    throw std::invalid_argument("remove_edge: edge not present");
  edges_.erase(it);
}

int FinStructure::max_symbol() const {
  int m = -1;
  for (const Edge& e : edges_) m = std::max(m, e.symbol);
  return m;
}

long long FinStructure::edge_count_inside(std::span<const Vertex> x) const {
  long long cnt = 0;
  for (const Edge& e : edges_) {
    bool inside = true;
    for (Vertex v : e.verts)
      if (!vset::contains(x, v)) {
        inside = false;
        break;
      }
    if (inside) ++cnt;
  }
  return cnt;
}

long long FinStructure::delta(std::span<const Vertex> x) const {
  if (!vset::is_sorted_set(x)) throw std::invalid_argument("delta: input not a sorted set");
  for (Vertex v : x)
    if (!has_vertex(v)) throw std::invalid_argument("delta: vertex not in structure");
  return static_cast<long long>(x.size()) - edge_count_inside(x);
}

long long FinStructure::delta() const { return delta(verts_); }

long long FinStructure::delta_rel(std::span<const Vertex> b, std::span<const Vertex> a) const {
  auto u = vset::set_union(a, b);
  return delta(u) - delta(a);
}

FinStructure FinStructure::restrict_to(std::span<const Vertex> x) const {
  FinStructure out(sig_.n);
  for (Vertex v : x) {
    if (!has_vertex(v)) throw std::invalid_argument("restrict_to: vertex not in structure");
    out.add_vertex(v);
  }
  for (const Edge& e : edges_) {
    bool inside = true;
    for (Vertex v : e.verts)
      if (!vset::contains(x, v)) {
        inside = false;
        break;
      }
    if (inside) out.add_edge(e.symbol, e.verts);
  }
  return out;
}

FinStructure FinStructure::reduct_below(int symbol_bound) const {
  FinStructure out(sig_.n);
  for (Vertex v : verts_) out.add_vertex(v);
  for (const Edge& e : edges_)
    if (e.symbol < symbol_bound) out.add_edge(e.symbol, e.verts);
  return out;
}

std::vector<int> FinStructure::edges_at(Vertex v) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (vset::contains(edges_[i].verts, v)) out.push_back(static_cast<int>(i));
  return out;
}

// --- templates --------------------------------------------------------------

std::vector<Edge> ExtensionTemplate::link_edges() const {
  std::vector<Edge> out;
  for (const Edge& e : pattern.edges()) {
    bool meets_ext = false;
    for (Vertex v : e.verts)
      if (std::find(ext.begin(), ext.end(), v) != ext.end()) meets_ext = true;
    if (meets_ext) out.push_back(e);
  }
  return out;
}

std::vector<Edge> ExtensionTemplate::base_edges() const {
  std::vector<Edge> out;
  for (const Edge& e : pattern.edges()) {
    bool meets_ext = false;
    for (Vertex v : e.verts)
      if (std::find(ext.begin(), ext.end(), v) != ext.end()) meets_ext = true;
    if (!meets_ext) out.push_back(e);
  }
  return out;
}

std::vector<int> ExtensionTemplate::sublanguage() const {
  std::set<int> syms;
  for (const Edge& e : link_edges()) syms.insert(e.symbol);
  return std::vector<int>(syms.begin(), syms.end());
}

ExtensionTemplate rel_qf_type(const FinStructure& s, std::vector<Vertex> base,
                              std::vector<Vertex> ext) {
  auto check_tuple = [&s](const std::vector<Vertex>& t, const char* what) {
    std::set<Vertex> seen;
    for (Vertex v : t) {
      if (!s.has_vertex(v))
        throw std::invalid_argument(std::string(what) + ": vertex not in structure");
      if (!seen.insert(v).second)
        throw std::invalid_argument(std::string(what) + ": repeated vertex");
    }
  };
  check_tuple(base, "rel_qf_type base");
  check_tuple(ext, "rel_qf_type ext");
  auto sb = vset::sorted(base);
  auto se = vset::sorted(ext);
  if (!vset::disjoint(sb, se))
    throw std::invalid_argument("rel_qf_type: base and ext overlap");

  ExtensionTemplate t;
  t.base = std::move(base);
  t.ext = std::move(ext);
  t.pattern = FinStructure(s.n());
  for (Vertex v : sb) t.pattern.add_vertex(v);
  for (Vertex v : se) t.pattern.add_vertex(v);
  auto all = vset::set_union(sb, se);
  for (const Edge& e : s.edges()) {
    if (!vset::is_subset(e.verts, all)) continue;
    bool meets_ext = false;
    for (Vertex v : e.verts)
      if (vset::contains(se, v)) meets_ext = true;
    // keep base-internal edges (the base type constraint) and link edges
    (void)meets_ext;
    t.pattern.add_edge(e.symbol, e.verts);
  }
  return t;
}

namespace {

// Backtracking state for template isomorphism: bijections of a.base -> b.base
// and a.ext -> b.ext are grown one vertex at a time, and every a-edge whose
// vertices are all mapped must land on a b-edge of the same pool (link or
// base) as soon as it completes, which prunes the search to near-linear on
// cycle-shaped templates.
struct TemplateMatcher {
  const ExtensionTemplate& a;
  const ExtensionTemplate& b;
  bool strict_base;
  std::vector<Edge> a_link, a_base;      // a's edge pools
  std::set<Edge> b_link, b_base;         // b's pools, for membership tests
  std::map<Vertex, Vertex> m;
  std::vector<bool> base_used, ext_used;

  TemplateMatcher(const ExtensionTemplate& a_, const ExtensionTemplate& b_,
                  bool strict)
      : a(a_), b(b_), strict_base(strict), a_link(a_.link_edges()),
        a_base(a_.base_edges()), base_used(b_.base.size(), false),
        ext_used(b_.ext.size(), false) {
    for (const Edge& e : b.link_edges()) b_link.insert(e);
    if (strict_base)
      for (const Edge& e : b.base_edges()) b_base.insert(e);
  }

  bool completed_edges_ok(Vertex just_mapped) const {
    auto check_pool = [&](const std::vector<Edge>& pool, const std::set<Edge>& want) {
      for (const Edge& e : pool) {
        if (!vset::contains(e.verts, just_mapped)) continue;
        Edge r;
        r.symbol = e.symbol;
        bool complete = true;
        for (Vertex v : e.verts) {
          auto it = m.find(v);
          if (it == m.end()) {
            complete = false;
            break;
          }
          r.verts.push_back(it->second);
        }
        if (!complete) continue;
        std::sort(r.verts.begin(), r.verts.end());
        if (!want.count(r)) return false;
      }
      return true;
    };
    if (!check_pool(a_link, b_link)) return false;
    if (strict_base && !check_pool(a_base, b_base)) return false;
    return true;
  }

  bool dfs(std::size_t base_pos, std::size_t ext_pos) {
    if (base_pos < a.base.size()) {
      for (std::size_t i = 0; i < b.base.size(); ++i) {
        if (base_used[i]) continue;
        base_used[i] = true;
        m[a.base[base_pos]] = b.base[i];
        if (completed_edges_ok(a.base[base_pos]) && dfs(base_pos + 1, ext_pos))
          return true;
        m.erase(a.base[base_pos]);
        base_used[i] = false;
      }
      return false;
    }
    if (ext_pos < a.ext.size()) {
      for (std::size_t i = 0; i < b.ext.size(); ++i) {
        if (ext_used[i]) continue;
        ext_used[i] = true;
        m[a.ext[ext_pos]] = b.ext[i];
        if (completed_edges_ok(a.ext[ext_pos]) && dfs(base_pos, ext_pos + 1))
          return true;
        m.erase(a.ext[ext_pos]);
        ext_used[i] = false;
      }
      return false;
    }
    // all vertices mapped and every completed a-edge landed in b's pool; the
    // counts agree and the map is injective, so the edge sets match exactly
    return true;
  }
};

}  // namespace

bool templates_isomorphic(const ExtensionTemplate& a, const ExtensionTemplate& b,
                          bool strict_base) {
  if (a.base.size() != b.base.size() || a.ext.size() != b.ext.size()) return false;
  if (a.link_edges().size() != b.link_edges().size()) return false;
  if (strict_base && a.base_edges().size() != b.base_edges().size()) return false;
  TemplateMatcher matcher(a, b, strict_base);
  return matcher.dfs(0, 0);
}

// --- free join / relabel ----------------------------------------------------

FinStructure free_join(const FinStructure& s1, const FinStructure& s2,
                       std::span<const Vertex> common) {
  if (s1.n() != s2.n()) throw std::invalid_argument("free_join: mismatched parameter n");
  auto overlap = vset::set_intersection(s1.vertices(), s2.vertices());
  std::vector<Vertex> c(common.begin(), common.end());
  std::sort(c.begin(), c.end());
  if (overlap != c)
    throw std::invalid_argument("free_join: vertex overlap differs from declared common part");
  for (const Edge& e : s1.edges())
    if (vset::is_subset(e.verts, c) && !s2.has_edge(e))
      throw std::invalid_argument("free_join: sides disagree on common-part edges");
  for (const Edge& e : s2.edges())
    if (vset::is_subset(e.verts, c) && !s1.has_edge(e))
      throw std::invalid_argument("free_join: sides disagree on common-part edges");

  FinStructure out(s1.n());
  for (Vertex v : s1.vertices()) out.add_vertex(v);
  for (Vertex v : s2.vertices()) out.add_vertex(v);
  for (const Edge& e : s1.edges()) out.add_edge(e.symbol, e.verts);
  for (const Edge& e : s2.edges()) out.add_edge(e.symbol, e.verts);
  return out;
}

FinStructure relabel(const FinStructure& s, const std::map<Vertex, Vertex>& map) {
  FinStructure out(s.n());
  std::set<Vertex> images;
  for (Vertex v : s.vertices()) {
    auto it = map.find(v);
    if (it == map.end()) throw std::invalid_argument("relabel: map not total");
    if (!images.insert(it->second).second)
      throw std::invalid_argument("relabel: map not injective");
    out.add_vertex(it->second);
  }
  for (const Edge& e : s.edges()) {
    std::vector<Vertex> vs;
    for (Vertex v : e.verts) vs.push_back(map.at(v));
    out.add_edge(e.symbol, std::move(vs));
  }
  return out;
}

ZetaReport zeta_check(const FinStructure& s) {
  const auto& es = s.edges();
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = 0; j < es.size(); ++j) {
      if (i == j) continue;
      if (es[i].symbol == es[j].symbol) continue;
      if (vset::is_subset(es[j].verts, es[i].verts))
        return ZetaReport{false, std::make_pair(es[i], es[j])};
    }
  return ZetaReport{};
}

// --- subgraph matching ------------------------------------------------------

namespace {

struct Matcher {
  const FinStructure& pattern;
  const FinStructure& host;
  const std::function<bool(const std::map<Vertex, Vertex>&)>& cb;
  std::vector<Vertex> order;              // pattern vertices in assignment order
  std::map<Vertex, Vertex> assignment;
  std::unordered_set<Vertex> used;
  bool stopped = false;

  bool edge_ok_partial(const Edge& e) {
    // if all vertices of e are assigned, its image must be a host edge
    Edge img;
    img.symbol = e.symbol;
    for (Vertex v : e.verts) {
      auto it = assignment.find(v);
      if (it == assignment.end()) return true;
      img.verts.push_back(it->second);
    }
    std::sort(img.verts.begin(), img.verts.end());
    return host.has_edge(img);
  }

  void run(std::size_t pos) {
    if (stopped) return;
    if (pos == order.size()) {
      if (!cb(assignment)) stopped = true;
      return;
    }
    Vertex pv = order[pos];
    // candidate host vertices: if pv lies on an edge with an assigned vertex,
    // restrict to neighbours of that image, else all host vertices
    std::vector<Vertex> candidates;
    bool restricted = false;
    for (const Edge& e : pattern.edges()) {
      if (!vset::contains(e.verts, pv)) continue;
      for (Vertex w : e.verts) {
        auto it = assignment.find(w);
        if (it == assignment.end()) continue;
        restricted = true;
        for (int ei : host.edges_at(it->second))
          for (Vertex hv : host.edges()[ei].verts) candidates.push_back(hv);
        break;
      }
      if (restricted) break;
    }
    if (!restricted)
      candidates.assign(host.vertices().begin(), host.vertices().end());
    else
      candidates = vset::sorted(std::move(candidates));

    for (Vertex hv : candidates) {
      if (used.count(hv)) continue;
      assignment[pv] = hv;
      used.insert(hv);
      bool ok = true;
      for (const Edge& e : pattern.edges())
        if (vset::contains(e.verts, pv) && !edge_ok_partial(e)) {
          ok = false;
          break;
        }
      if (ok) run(pos + 1);
      used.erase(hv);
      assignment.erase(pv);
      if (stopped) return;
    }
  }
};

}  // namespace

void find_embeddings(const FinStructure& pattern, const FinStructure& host,
                     const std::map<Vertex, Vertex>& anchor,
                     const std::function<bool(const std::map<Vertex, Vertex>&)>& cb) {
  Matcher m{pattern, host, cb};
  std::set<Vertex> anchored;
  for (const auto& [pv, hv] : anchor) {
    if (!pattern.has_vertex(pv))
      throw std::invalid_argument("find_embeddings: anchor vertex not in pattern");
    if (!host.has_vertex(hv))
      throw std::invalid_argument("find_embeddings: anchor image not in host");
    m.assignment[pv] = hv;
    if (!m.used.insert(hv).second)
      throw std::invalid_argument("find_embeddings: anchor not injective");
    anchored.insert(pv);
  }
  for (const Edge& e : pattern.edges())
    if (!m.edge_ok_partial(e)) return;

  // assignment order: repeatedly pick an unassigned vertex sharing an edge
  // with the assigned region when possible (keeps candidate sets small)
  std::set<Vertex> remaining(pattern.vertices().begin(), pattern.vertices().end());
  for (Vertex v : anchored) remaining.erase(v);
  std::set<Vertex> frontier_known = anchored;
  while (!remaining.empty()) {
    Vertex pick = -1;
    for (Vertex v : remaining) {
      for (const Edge& e : pattern.edges()) {
        if (!vset::contains(e.verts, v)) continue;
        for (Vertex w : e.verts)
          if (frontier_known.count(w)) {
            pick = v;
            break;
          }
        if (pick >= 0) break;
      }
      if (pick >= 0) break;
    }
    if (pick < 0) pick = *remaining.begin();
    m.order.push_back(pick);
    remaining.erase(pick);
    frontier_known.insert(pick);
  }
  m.run(0);
}

// --- serialization ----------------------------------------------------------

using nlohmann::json;

std::string to_json_string(const FinStructure& s, bool pretty) {
  json j;
  j["n"] = s.n();
  j["vertices"] = s.vertices();
  json edges = json::array();
  for (const Edge& e : s.edges()) edges.push_back(json::array({e.symbol, e.verts}));
  j["edges"] = std::move(edges);
  return pretty ? j.dump(2) : j.dump();
}

FinStructure structure_from_json_string(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("n") || !j.contains("vertices") || !j.contains("edges"))
    throw std::invalid_argument("structure json: missing n/vertices/edges");
  FinStructure s(j.at("n").get<int>());
  for (const auto& v : j.at("vertices")) s.add_vertex(v.get<Vertex>());
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("structure json: edge entries must be [symbol,[v...]]");
    s.add_edge(e.at(0).get<int>(), e.at(1).get<std::vector<Vertex>>());
  }
  return s;
}

FinStructure structure_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return structure_from_json_string(ss.str());
}

void structure_to_json_file(const FinStructure& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json_string(s, true) << "\n";
}

std::string to_dot(const FinStructure& s, const std::string& name) {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (Vertex v : s.vertices())
    os << "  v" << v << " [label=\"" << v << "\", shape=circle];\n";
  int idx = 0;
  for (const Edge& e : s.edges()) {
    std::string hub = "e" + std::to_string(idx++);
    os << "  " << hub << " [label=\"R" << (e.symbol == 0 ? std::string("") : std::to_string(e.symbol - 1))
       << "\", shape=box];\n";
    for (Vertex v : e.verts) os << "  " << hub << " -- v" << v << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace amalg
