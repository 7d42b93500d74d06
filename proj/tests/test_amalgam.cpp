#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <vector>

#include "amalg/amalgam.hpp"
#include "amalg/closure.hpp"
#include "amalg/extension.hpp"
#include "amalg/gadgets.hpp"
#include "amalg/mu.hpp"
#include "amalg/oracle.hpp"
#include "amalg/structure.hpp"
#include "doctest.h"

using namespace amalg;

namespace {

FinStructure random_structure(std::mt19937_64& rng, int max_verts,
                              double edge_prob) {
  std::uniform_int_distribution<int> nv(1, max_verts);
  FinStructure s(1);
  const int v = nv(rng);
  for (int i = 0; i < v; ++i) s.add_fresh_vertex();
  std::bernoulli_distribution flip(edge_prob);
  for (int a = 0; a < v; ++a)
    for (int b = a + 1; b < v; ++b)
      for (int c = b + 1; c < v; ++c)
        if (flip(rng)) s.add_edge(0, {a, b, c});
  return s;
}

}  // namespace

TEST_CASE("decompose_strong splits a chain into its minimal steps") {
  // base pair, then a free point, then a pendant over the base
  FinStructure s(1);
  for (int i = 0; i < 4; ++i) s.add_fresh_vertex();
  s.add_edge(0, {0, 1, 3});
  std::vector<Vertex> a{0, 1};
  std::vector<Vertex> b{0, 1, 2, 3};
  auto steps = decompose_strong(s, a, b);
  REQUIRE(steps.size() == 2);
  // deterministic order: the pendant {3}? no — smallest then lex-least: both
  // singletons; {2} (free point) precedes {3}
  CHECK(steps[0].added == std::vector<Vertex>{2});
  CHECK(steps[0].free_point);
  CHECK(steps[1].added == std::vector<Vertex>{3});
  CHECK_FALSE(steps[1].free_point);

  // a simply algebraic extension with several points is one step
  Gadget dh = build_D_hat(2, 4);
  auto dsteps = decompose_strong(dh.structure, vset::sorted(dh.base),
                                 vset::sorted(dh.structure.vertices()));
  REQUIRE(dsteps.size() == 1);
  CHECK(dsteps[0].added == vset::sorted(dh.ext));
  CHECK_FALSE(dsteps[0].free_point);

  // a non-strong base throws: the D gadget base has relative delta -1
  Gadget d = build_D(2, 4);
  CHECK_THROWS(decompose_strong(d.structure, vset::sorted(d.base),
                                vset::sorted(d.structure.vertices())));
}

TEST_CASE("algebraic_amalgamate outcome cases") {
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  // pendant template over an edge-free pair; bound mu = 5
  FinStructure tmpl(1);
  for (int i = 0; i < 3; ++i) tmpl.add_fresh_vertex();
  tmpl.add_edge(0, {0, 1, 2});
  std::vector<Vertex> a{0, 1};

  SUBCASE("clean accept") {
    FinStructure host(1);
    host.add_fresh_vertex();
    host.add_fresh_vertex();
    AmalgamOutcome out = algebraic_amalgamate(a, tmpl, host, snap);
    REQUIRE(out.accepted());
    CHECK(out.result->size() == 3);
    CHECK(out.result->edges().size() == 1);
    CHECK(out.embedding.at(0) == 0);
    CHECK(out.embedding.count(2) == 1);
  }
  SUBCASE("saturated host raises the family exception") {
    FinStructure host(1);
    host.add_fresh_vertex();
    host.add_fresh_vertex();
    for (int i = 0; i < 5; ++i) {
      Vertex c = host.add_fresh_vertex();
      host.add_edge(0, {0, 1, c});
    }
    AmalgamOutcome out = algebraic_amalgamate(a, tmpl, host, snap);
    REQUIRE_FALSE(out.accepted());
    CHECK(out.exception == AmalgamException::kMaxFamily);
    CHECK(out.certificate.family.size() == 5);
  }
  SUBCASE("negative increment in the link sublanguage is flagged") {
    FinStructure host(1);
    for (int i = 0; i < 3; ++i) host.add_fresh_vertex();
    Vertex y = host.add_fresh_vertex();
    host.add_edge(0, {0, 1, y});
    host.add_edge(0, {0, 2, y});
    // y has increment 1 - 2 = -1 over the base {0,1,2} of a base-3 template
    ExtensionTemplate om = omega(0, 1);
    std::map<Vertex, Vertex> rl;
    for (size_t j = 0; j < om.base.size(); ++j) rl[om.base[j]] = (Vertex)j;
    Vertex next = 100;
    for (Vertex e : om.ext) rl[e] = next++;
    FinStructure b1 = relabel(om.pattern, rl);
    std::vector<Vertex> base3{0, 1, 2};
    AmalgamOutcome out = algebraic_amalgamate(base3, b1, host, snap);
    REQUIRE_FALSE(out.accepted());
    CHECK(out.exception == AmalgamException::kNegativeY);
    CHECK(out.certificate.y_set == std::vector<Vertex>{y});
  }
}

TEST_CASE("strong_amalgamate preserves both sides strongly") {
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  std::mt19937_64 rng(2026);
  int done = 0;
  while (done < 60) {
    FinStructure c = random_structure(rng, 7, 0.12);
    if (!in_class(c, snap).accepted) continue;
    // pick a strong subset A via the closure of a random seed
    std::uniform_int_distribution<int> pv(0, static_cast<int>(c.size()) - 1);
    std::vector<Vertex> seed{c.vertices()[pv(rng)]};
    std::vector<Vertex> a = ss_closure(c, vset::sorted(seed)).closure;
    if (a.size() == c.size()) continue;  // need a proper extension
    // B1 = C relabeled above A, B2 = C itself
    std::map<Vertex, Vertex> rl;
    Vertex next = c.max_vertex() + 1;
    for (Vertex v : c.vertices()) {
      if (vset::contains(a, v))
        rl[v] = v;
      else
        rl[v] = next++;
    }
    FinStructure b1 = relabel(c, rl);
    StrongAmalgamResult res = strong_amalgamate(a, b1, c, snap);
    ++done;
    CHECK(in_class(res.amalgam, snap).accepted);
    // B2 is untouched and strong in D
    for (const Edge& e : c.edges())
      CHECK(res.amalgam.has_edge(e.symbol, e.verts));
    CHECK(is_strong(res.amalgam, vset::sorted(c.vertices())));
    // g(B1) is strong in D and g restricts to the identity on A
    std::vector<Vertex> img;
    for (Vertex v : b1.vertices()) img.push_back(res.g.at(v));
    CHECK(is_strong(res.amalgam, vset::sorted(img)));
    for (Vertex v : a) CHECK(res.g.at(v) == v);
  }
  CHECK(done == 60);
}
