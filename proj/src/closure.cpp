#include "amalg/closure.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace amalg {

namespace {

// Dinic max-flow on a small ad-hoc graph.
struct Dinic {
  struct Arc {
    int to;
    long long cap;
    int rev;
  };
  std::vector<std::vector<Arc>> g;
  std::vector<int> level, iter;

  explicit Dinic(int nodes) : g(nodes) {}

  void add_arc(int from, int to, long long cap) {
    g[from].push_back({to, cap, static_cast<int>(g[to].size())});
    g[to].push_back({from, 0, static_cast<int>(g[from].size()) - 1});
  }

  bool bfs(int s, int t) {
    level.assign(g.size(), -1);
    std::queue<int> q;
    level[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const Arc& a : g[v])
        if (a.cap > 0 && level[a.to] < 0) {
          level[a.to] = level[v] + 1;
          q.push(a.to);
        }
    }
    return level[t] >= 0;
  }

  long long dfs(int v, int t, long long f) {
    if (v == t) return f;
    for (int& i = iter[v]; i < static_cast<int>(g[v].size()); ++i) {
      Arc& a = g[v][i];
      if (a.cap > 0 && level[v] < level[a.to]) {
        long long d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0) {
          a.cap -= d;
          g[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  long long max_flow(int s, int t) {
    long long flow = 0;
    while (bfs(s, t)) {
      iter.assign(g.size(), 0);
      long long f;
      while ((f = dfs(s, t, std::numeric_limits<long long>::max())) > 0) flow += f;
    }
    return flow;
  }

  // vertices reachable from s in the residual graph (minimal min-cut side)
  std::vector<bool> min_cut_side(int s) {
    std::vector<bool> seen(g.size(), false);
    std::queue<int> q;
    seen[s] = true;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const Arc& a : g[v])
        if (a.cap > 0 && !seen[a.to]) {
          seen[a.to] = true;
          q.push(a.to);
        }
    }
    return seen;
  }
};

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

// Builds the edge-selection network for min_{D >= A} delta(D).  Selecting an
// edge earns 1 and forces payment of 1 per selected vertex outside A.  The
// minimal residual-reachable side of the min cut yields the unique smallest
// minimizing D.
struct SupersetProblem {
  const FinStructure& s;
  std::vector<Vertex> a;
  std::vector<Vertex> free_verts;  // vertices outside A
  Dinic net;
  int source, sink;
  long long best;  // min delta over supersets

  SupersetProblem(const FinStructure& str, std::span<const Vertex> anchor)
      : s(str),
        a(anchor.begin(), anchor.end()),
        free_verts(vset::set_difference(str.vertices(),
                                        std::vector<Vertex>(anchor.begin(), anchor.end()))),
        net(2 + str.edges().size() + free_verts.size()),
        source(0),
        sink(1),
        best(0) {
    for (Vertex v : a)
      if (!s.has_vertex(v))
        throw std::invalid_argument("superset predimension: vertex not in structure");
    const int edge_base = 2;
    const int vert_base = 2 + static_cast<int>(s.edges().size());
    std::map<Vertex, int> vert_node;
    for (std::size_t i = 0; i < free_verts.size(); ++i)
      vert_node[free_verts[i]] = vert_base + static_cast<int>(i);
    for (std::size_t i = 0; i < s.edges().size(); ++i) {
      net.add_arc(source, edge_base + static_cast<int>(i), 1);
      for (Vertex v : s.edges()[i].verts) {
        auto it = vert_node.find(v);
        if (it != vert_node.end()) net.add_arc(edge_base + static_cast<int>(i), it->second, kInf);
      }
    }
    for (std::size_t i = 0; i < free_verts.size(); ++i)
      net.add_arc(vert_base + static_cast<int>(i), sink, 1);

    long long cut = net.max_flow(source, sink);
    long long profit = static_cast<long long>(s.edges().size()) - cut;
    best = static_cast<long long>(a.size()) - profit;
  }

  std::vector<Vertex> minimal_minimizer() {
    auto side = net.min_cut_side(source);
    const int vert_base = 2 + static_cast<int>(s.edges().size());
    std::vector<Vertex> out(a);
    for (std::size_t i = 0; i < free_verts.size(); ++i)
      if (side[vert_base + static_cast<int>(i)]) out.push_back(free_verts[i]);
    std::sort(out.begin(), out.end());
    return out;
  }
};

std::vector<Vertex> checked_sorted(const FinStructure& s, std::span<const Vertex> a) {
  std::vector<Vertex> v(a.begin(), a.end());
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw std::invalid_argument("vertex set has repeats");
  for (Vertex x : v)
    if (!s.has_vertex(x)) throw std::invalid_argument("vertex not in structure");
  return v;
}

}  // namespace

long long min_delta_over_supersets(const FinStructure& s, std::span<const Vertex> a) {
  auto v = checked_sorted(s, a);
  return SupersetProblem(s, v).best;
}

std::vector<Vertex> min_delta_witness(const FinStructure& s, std::span<const Vertex> a) {
  auto v = checked_sorted(s, a);
  return SupersetProblem(s, v).minimal_minimizer();
}

bool is_strong(const FinStructure& s, std::span<const Vertex> a) {
  auto v = checked_sorted(s, a);
  return s.delta(v) == SupersetProblem(s, v).best;
}

ClosureReport ss_closure(const FinStructure& s, std::span<const Vertex> a) {
  auto v = checked_sorted(s, a);
  SupersetProblem prob(s, v);
  ClosureReport r;
  r.closure = prob.minimal_minimizer();
  r.delta_value = prob.best;
  r.witness_chain.push_back(v);
  if (r.closure != v) r.witness_chain.push_back(r.closure);
  return r;
}

long long dim(const FinStructure& s, std::span<const Vertex> a) {
  return min_delta_over_supersets(s, a);
}

namespace {

// Exhaustive bounded witness search: is there W subset of the free vertices
// with |W| <= m and delta_reduct(A u W) < target?  Returns the witness.
std::optional<std::vector<Vertex>> bounded_witness(const FinStructure& reduct,
                                                   const std::vector<Vertex>& a,
                                                   long long target, int m) {
  std::vector<Vertex> pool = vset::set_difference(reduct.vertices(), a);
  std::vector<Vertex> current = a;
  std::optional<std::vector<Vertex>> found;
  // DFS over subsets of pool of size <= m (pool small at the call sites)
  std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int left) {
    if (found) return;
    if (reduct.delta(current) < target) {
      found = current;
      return;
    }
    if (left == 0 || idx >= pool.size()) return;
    for (std::size_t i = idx; i < pool.size(); ++i) {
      auto pos = std::lower_bound(current.begin(), current.end(), pool[i]);
      current.insert(pos, pool[i]);
      rec(i + 1, left - 1);
      current.erase(std::lower_bound(current.begin(), current.end(), pool[i]));
      if (found) return;
    }
  };
  rec(0, m);
  return found;
}

}  // namespace

GValue g_value(const FinStructure& s, std::span<const Vertex> a) {
  auto v = checked_sorted(s, a);
  long long bound = static_cast<long long>(s.size()) - static_cast<long long>(v.size()) +
                    s.max_symbol() + 2;
  auto r = g_value_below(s, v, bound + 1);
  if (!r) return GValue::infinite();
  FinStructure red = s.reduct_below(static_cast<int>(*r));
  auto w = bounded_witness(red, v, red.delta(v), static_cast<int>(*r));
  return GValue::of(*r, w ? *w : v);
}

std::optional<long long> g_value_below(const FinStructure& s, std::span<const Vertex> a,
                                       long long cap) {
  auto v = checked_sorted(s, a);
  long long hard_bound = static_cast<long long>(s.size()) - static_cast<long long>(v.size()) +
                         s.max_symbol() + 2;
  long long limit = std::min(cap - 1, hard_bound);
  for (long long m = 0; m <= limit; ++m) {
    FinStructure red = s.reduct_below(static_cast<int>(m));
    long long da = red.delta(v);
    SupersetProblem prob(red, v);
    if (prob.best >= da) continue;  // A strong in this reduct: no witness of any size
    auto minimizer = prob.minimal_minimizer();
    if (static_cast<long long>(minimizer.size()) <= static_cast<long long>(v.size()) + m)
      return m;
    if (bounded_witness(red, v, da, static_cast<int>(m))) return m;
  }
  return std::nullopt;
}

long long flatness_defect(const FinStructure& s,
                          const std::vector<std::vector<Vertex>>& closed_sets,
                          EmptyFamilyConvention convention) {
  std::vector<std::vector<Vertex>> sets;
  for (const auto& e : closed_sets) {
    auto v = checked_sorted(s, e);
    if (!is_strong(s, v))
      throw std::invalid_argument("flatness_defect: input set is not closed");
    sets.push_back(std::move(v));
  }
  const std::size_t k = sets.size();
  long long total = 0;
  for (std::size_t mask = 0; mask < (1u << k); ++mask) {
    std::vector<Vertex> e;
    if (mask == 0) {
      if (convention == EmptyFamilyConvention::kClosureOfUnion) {
        for (const auto& si : sets) e = vset::set_union(e, si);
        e = ss_closure(s, e).closure;
      } else {
        e = s.vertices();
      }
    } else {
      bool first = true;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) {
          e = first ? sets[i] : vset::set_intersection(e, sets[i]);
          first = false;
        }
    }
    long long sign = (std::popcount(mask) % 2 == 0) ? 1 : -1;
    total += sign * dim(s, e);
  }
  return total;
}

}  // namespace amalg
