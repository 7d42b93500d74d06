#include "amalg/gadgets.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amalg/amalgam.hpp"
#include "amalg/closure.hpp"
#include "amalg/extension.hpp"
#include "amalg/oracle.hpp"

namespace amalg {

ExtensionTemplate Gadget::as_template() const {
  ExtensionTemplate t;
  t.pattern = structure;
  t.base = base;
  t.ext = ext;
  return t;
}

namespace {

// Shared cycle scaffolding: vertices a_1..a_k at ids 0..k-1, then `extra`
// distinguished base points, then b_1..b_2t, with the ladder edges
// {b_i, a_((i-1) mod k)+1, b_(i+1)} for 1 <= i < 2t.
struct CycleBuild {
  FinStructure s;
  std::vector<Vertex> a;  // a_1..a_k
  std::vector<Vertex> b;  // b_1..b_2t

  CycleBuild(int k, int t, int extra_base_points, int n) : s(n) {
    for (int i = 0; i < k; ++i) a.push_back(s.add_fresh_vertex());
    for (int i = 0; i < extra_base_points; ++i) s.add_fresh_vertex();
    for (int i = 0; i < 2 * t; ++i) b.push_back(s.add_fresh_vertex());
    for (int i = 1; i < 2 * t; ++i) {
      s.add_edge(0, {b[i - 1], a[(i - 1) % k], b[i]});
    }
  }
};

}  // namespace

Gadget build_D(int k, int t, int n) {
  if (k < 2 || t <= k) throw std::invalid_argument("build_D: need t > k >= 2");
  CycleBuild cb(k, t, /*extra_base_points=*/2, n);
  const Vertex g = k;
  const Vertex h = k + 1;
  cb.s.add_edge(0, {cb.b[2 * t - 1], g, cb.b[0]});
  cb.s.add_edge(0, {cb.b[0], h, cb.b[t]});
  Gadget out;
  std::ostringstream name;
  name << "D(" << k << "," << t << ")";
  out.name = name.str();
  out.structure = std::move(cb.s);
  out.base = cb.a;
  out.base.push_back(g);
  out.base.push_back(h);
  out.ext = cb.b;
  return out;
}

Gadget build_D_hat(int k, int t, int n) {
  if (k < 2 || t <= k + 1)
    throw std::invalid_argument("build_D_hat: need t > k+1, k >= 2");
  CycleBuild cb(k, t, /*extra_base_points=*/1, n);
  const Vertex g = k;
  cb.s.add_edge(0, {cb.b[2 * t - 1], g, cb.b[0]});
  Gadget out;
  std::ostringstream name;
  name << "Dhat(" << k << "," << t << ")";
  out.name = name.str();
  out.structure = std::move(cb.s);
  out.base = cb.a;
  out.base.push_back(g);
  out.ext = cb.b;
  return out;
}

Gadget build_path(PathKind kind, int k, int n) {
  const int min_k = kind == PathKind::P ? 3 : kind == PathKind::H ? 4 : 5;
  if (k < min_k) throw std::invalid_argument("build_path: k below minimum for this kind");
  FinStructure s(n);
  std::vector<Vertex> a;
  for (int i = 0; i < k; ++i) a.push_back(s.add_fresh_vertex());
  for (int i = 0; i + 2 < k; ++i) s.add_edge(0, {a[i], a[i + 1], a[i + 2]});
  char tag = 'P';
  if (kind != PathKind::P) {
    tag = kind == PathKind::H ? 'H' : 'L';
    s.add_edge(0, {a[k - 2], a[k - 1], a[0]});
    if (kind == PathKind::L) s.add_edge(0, {a[k - 1], a[0], a[1]});
  }
  Gadget out;
  std::ostringstream name;
  name << tag << "_" << k;
  out.name = name.str();
  out.structure = std::move(s);
  switch (kind) {
    case PathKind::P:
      out.base = {a.front(), a.back()};
      break;
    case PathKind::H:
      out.base = {a.front()};
      break;
    case PathKind::L:
      out.base = {};
      break;
  }
  for (Vertex v : a)
    if (std::find(out.base.begin(), out.base.end(), v) == out.base.end())
      out.ext.push_back(v);
  return out;
}

ExtensionTemplate omega(long long i, int n) {
  if (i < 0) throw std::invalid_argument("omega: negative index");
  const int k = n + 1;
  const long long t = n + 3 + i;
  if (t > 1'000'000) throw std::invalid_argument("omega: index too large");
  return build_D_hat(k, static_cast<int>(t), n).as_template();
}

namespace {

// All injective ordered tuples in `host` realizing exactly the base-internal
// quantifier-free type of `t` (edges inside the image correspond one-to-one
// with the template's base edges under the positional map).
std::vector<std::vector<Vertex>> base_anchors(const ExtensionTemplate& t,
                                              const FinStructure& host) {
  std::vector<std::vector<Vertex>> out;
  const size_t m = t.base.size();
  std::vector<Vertex> pick;
  std::vector<Edge> want = t.base_edges();
  auto rec = [&](auto&& self) -> void {
    if (pick.size() == m) {
      // Forward direction: every template base edge lands on a host edge.
      std::map<Vertex, Vertex> mp;
      for (size_t j = 0; j < m; ++j) mp[t.base[j]] = pick[j];
      for (const Edge& e : want) {
        std::vector<Vertex> img;
        for (Vertex v : e.verts) img.push_back(mp.at(v));
        img = vset::sorted(std::move(img));
        if (img.size() != e.verts.size() || !host.has_edge(e.symbol, img)) return;
      }
      // Reverse direction: no extra host edges inside the image.
      std::vector<Vertex> img_set = vset::sorted(pick);
      if (host.edge_count_inside(img_set) != static_cast<int>(want.size())) return;
      out.push_back(pick);
      return;
    }
    for (Vertex v : host.vertices()) {
      if (std::find(pick.begin(), pick.end(), v) != pick.end()) continue;
      pick.push_back(v);
      self(self);
      pick.pop_back();
    }
  };
  rec(rec);
  return out;
}

}  // namespace

UnblockReport verify_unblockable(const ExtensionTemplate& t, const MuSnapshot& snap,
                                 int host_size_bound) {
  UnblockReport rep;
  if (!is_permissive(snap, 3))
    throw std::invalid_argument("verify_unblockable: snapshot not 3-permissive");
  std::map<std::string, bool> verdict_cache;
  for (int v = static_cast<int>(t.base.size()); v <= host_size_bound; ++v) {
    oracle::EnumerationSpec spec;
    spec.vertex_budget = v;
    spec.symbols = {0};
    spec.n = t.pattern.n();
    spec.class_filter = &snap;
    for (const FinStructure& host : oracle::enumerate_structures(spec)) {
      ++rep.hosts_checked;
      for (const auto& anchor : base_anchors(t, host)) {
        ++rep.anchors_checked;
        std::map<Vertex, Vertex> rl;
        for (size_t j = 0; j < t.base.size(); ++j) rl[t.base[j]] = anchor[j];
        Vertex next = host.empty() ? 0 : host.max_vertex() + 1;
        for (Vertex e : t.ext) rl[e] = next++;
        const FinStructure joined =
            free_join(host, relabel(t.pattern, rl), vset::sorted(anchor));
        // joins repeat up to isomorphism across anchors and hosts; cache the
        // membership verdict by canonical key
        const std::string key = oracle::canonical_key(joined);
        auto it = verdict_cache.find(key);
        if (it == verdict_cache.end())
          it = verdict_cache.emplace(key, in_class(joined, snap).accepted).first;
        if (it->second) continue;
        // fallback clause: the host already realizes the full mu bound
        long long cap = 1;
        for (int col : snap.column_indices())
          if (auto j1 = snap.j1(col)) cap = std::max(cap, *j1 + 1);
        MaybeStage g = kInfiniteStage;
        if (auto gv = g_value_below(host, vset::sorted(anchor), cap)) g = *gv;
        const long long bound = mu_eval(snap, host, anchor, t, g);
        if (max_disjoint_family(host, anchor, t).count >= bound) continue;
        rep.ok = false;
        rep.bad_host = host;
        rep.bad_anchor = anchor;
        rep.detail = "free join left the class and the host is unsaturated";
        return rep;
      }
    }
  }
  return rep;
}

FinStructure attach_D(const FinStructure& m, std::span<const Vertex> c, int t) {
  if (c.size() < 4) throw std::invalid_argument("attach_D: tuple must have length >= 4");
  std::set<Vertex> seen(c.begin(), c.end());
  if (seen.size() != c.size())
    throw std::invalid_argument("attach_D: tuple entries must be distinct");
  for (Vertex v : c)
    if (!m.has_vertex(v)) throw std::invalid_argument("attach_D: tuple not inside m");
  const int k = static_cast<int>(c.size()) - 2;
  Gadget d = build_D(k, t, m.n());
  std::map<Vertex, Vertex> rl;
  for (size_t j = 0; j < d.base.size(); ++j) rl[d.base[j]] = c[j];
  FinStructure out = m;
  for (Vertex e : d.ext) rl[e] = out.add_fresh_vertex();
  // Every gadget edge meets the new cycle, so none can collide with m.
  for (const Edge& edge : d.structure.edges()) {
    std::vector<Vertex> img;
    for (Vertex v : edge.verts) img.push_back(rl.at(v));
    out.add_edge(edge.symbol, img);
  }
  return out;
}

FinStructure drop_dimension(const FinStructure& m, std::span<const Vertex> b, int t) {
  if (b.size() > 4) throw std::invalid_argument("drop_dimension: |b| must be <= 4");
  FinStructure cur = m;
  std::vector<Vertex> padded(b.begin(), b.end());
  while (padded.size() < 4) padded.push_back(cur.add_fresh_vertex());
  const int reps = 5 - static_cast<int>(b.size());
  for (int r = 0; r < reps; ++r) cur = attach_D(cur, padded, t + r);
  return cur;
}

}  // namespace amalg
