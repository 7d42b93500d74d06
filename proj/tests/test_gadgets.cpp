#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <vector>

#include "amalg/closure.hpp"
#include "amalg/extension.hpp"
#include "amalg/gadgets.hpp"
#include "amalg/mu.hpp"
#include "amalg/structure.hpp"
#include "doctest.h"

using namespace amalg;

TEST_CASE("D_t counts and relative delta") {
  Gadget d = build_D(2, 4);
  CHECK(d.structure.size() == 12);
  CHECK(d.structure.edges().size() == 9);
  CHECK(d.base.size() == 4);
  CHECK(d.ext.size() == 8);
  CHECK(d.structure.delta_rel(vset::sorted(d.ext), vset::sorted(d.base)) == -1);
  Gadget d35 = build_D(3, 5);
  CHECK(d35.structure.size() == 15);
  CHECK(d35.structure.edges().size() == 11);
  CHECK(d35.structure.delta_rel(vset::sorted(d35.ext), vset::sorted(d35.base)) == -1);
  CHECK_THROWS(build_D(2, 2));
}

TEST_CASE("D-hat counts, relative delta, and minimal simple algebraicity") {
  for (auto [k, t] : {std::pair{2, 4}, {2, 5}, {3, 5}}) {
    Gadget g = build_D_hat(k, t);
    CHECK(static_cast<int>(g.structure.size()) == k + 1 + 2 * t);
    CHECK(static_cast<int>(g.structure.edges().size()) == 2 * t);
    CHECK(g.structure.delta_rel(vset::sorted(g.ext), vset::sorted(g.base)) == 0);
    CHECK(is_simply_algebraic(g.structure, g.base, g.ext));
  }
  CHECK_THROWS(build_D_hat(2, 3));
}

TEST_CASE("path gadget deltas and base sizes") {
  Gadget p = build_path(PathKind::P, 5);
  Gadget h = build_path(PathKind::H, 5);
  Gadget l = build_path(PathKind::L, 5);
  CHECK(p.structure.delta(vset::sorted(p.structure.vertices())) == 2);
  CHECK(h.structure.delta(vset::sorted(h.structure.vertices())) == 1);
  CHECK(l.structure.delta(vset::sorted(l.structure.vertices())) == 0);
  CHECK(p.base.size() == 2);
  CHECK(h.base.size() == 1);
  CHECK(l.base.empty());
  // H_k is simply algebraic over its single base point
  CHECK(is_simply_algebraic(h.structure, h.base, h.ext));
}

TEST_CASE("omega enumeration is graded and pairwise non-isomorphic") {
  std::vector<ExtensionTemplate> ts;
  for (long long i = 0; i < 4; ++i) ts.push_back(omega(i, 1));
  for (long long i = 0; i < 4; ++i) {
    CHECK(ts[i].base.size() == 3);
    CHECK(ts[i].ext.size() == 2 * (4 + i));
    CHECK(ts[i].link_edges().size() == 2 * (4 + i));
    for (long long j = 0; j < i; ++j)
      CHECK_FALSE(templates_isomorphic(ts[i], ts[j]));
  }
}

TEST_CASE("attach_D drops exactly the dimensions the law predicts") {
  // M = L_5 (closed, delta 0) plus two free points; dim of a free point is 1
  FinStructure m = build_path(PathKind::L, 5).structure;
  Vertex x = m.add_fresh_vertex();
  Vertex y = m.add_fresh_vertex();
  std::vector<Vertex> cx{x, y, 0, 1};  // k = 2: tuple (a1, a2, g, h)
  FinStructure m2 = attach_D(m, cx, 4);
  CHECK(m2.size() == m.size() + 8);
  CHECK(m2.edges().size() == m.edges().size() + 9);
  // every subset X of old vertices: new min-delta = old, minus 1 exactly when
  // a minimizer of X contains the whole attachment tuple
  const std::vector<Vertex> old = vset::sorted(m.vertices());
  const std::vector<Vertex> cset = vset::sorted(cx);
  for (Vertex v : old) {
    std::vector<Vertex> xs{v};
    long long before = min_delta_over_supersets(m, xs);
    long long after = min_delta_over_supersets(m2, xs);
    // union with the closed set realizing the drop
    std::vector<Vertex> with_c = vset::set_union(xs, cset);
    bool drops = min_delta_over_supersets(m, with_c) == before;
    CHECK(after == before - (drops ? 1 : 0));
  }
}

TEST_CASE("drop_dimension lowers the tuple dimension by exactly one") {
  FinStructure m(1);
  std::vector<Vertex> b;
  b.push_back(m.add_fresh_vertex());
  b.push_back(m.add_fresh_vertex());
  Vertex other = m.add_fresh_vertex();
  CHECK(min_delta_over_supersets(m, vset::sorted(b)) == 2);
  FinStructure m2 = drop_dimension(m, b, 5);
  CHECK(min_delta_over_supersets(m2, vset::sorted(b)) == 1);
  // a point whose minimizers avoid the tuple keeps its dimension
  std::vector<Vertex> xs{other};
  CHECK(min_delta_over_supersets(m2, xs) == 1);
  // overall nonnegativity is preserved
  std::vector<Vertex> none;
  CHECK(min_delta_over_supersets(m2, none) >= 0);
}

TEST_CASE("small unblockability audit accepts the live omegas") {
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  UnblockReport r0 = verify_unblockable(omega(*snap.j0(0), 1), snap, 4);
  CHECK(r0.ok);
  CHECK(r0.hosts_checked > 0);
}
