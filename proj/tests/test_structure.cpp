#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <vector>

#include "amalg/structure.hpp"
#include "doctest.h"

using namespace amalg;

namespace {

FinStructure triangle() {
  FinStructure s(1);
  for (int i = 0; i < 3; ++i) s.add_fresh_vertex();
  s.add_edge(0, {0, 1, 2});
  return s;
}

}  // namespace

TEST_CASE("vertex-set helpers") {
  std::vector<Vertex> a = {1, 3, 5};
  std::vector<Vertex> b = {3, 4};
  CHECK(vset::sorted({5, 3, 1}) == a);
  CHECK(vset::is_sorted_set(a));
  const std::vector<Vertex> dup{1, 1, 2};
  CHECK_FALSE(vset::is_sorted_set(dup));
  CHECK(vset::contains(a, 3));
  CHECK_FALSE(vset::contains(a, 2));
  CHECK(vset::set_union(a, b) == std::vector<Vertex>{1, 3, 4, 5});
  CHECK(vset::set_intersection(a, b) == std::vector<Vertex>{3});
  CHECK(vset::set_difference(a, b) == std::vector<Vertex>{1, 5});
  CHECK_FALSE(vset::disjoint(a, b));
  const std::vector<Vertex> three{3};
  CHECK(vset::is_subset(three, a));
}

TEST_CASE("signature arities") {
  Signature sig{2};
  CHECK(sig.arity(0) == 3);
  CHECK(sig.arity(1) == 4);
  CHECK(sig.arity(7) == 4);
}

TEST_CASE("edges are sorted sets and delta counts them") {
  FinStructure s = triangle();
  CHECK(s.size() == 3);
  CHECK(s.has_edge(0, std::vector<Vertex>{0, 1, 2}));
  CHECK(s.delta() == 2);
  CHECK(s.delta(std::vector<Vertex>{0, 1}) == 2);
  CHECK(s.delta_rel(std::vector<Vertex>{2}, std::vector<Vertex>{0, 1}) == 0);
  // adding an existing edge is an idempotent no-op
  s.add_edge(0, {0, 1, 2});
  CHECK(s.edges().size() == 1);
  CHECK_THROWS_AS(s.add_edge(0, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(s.add_edge(0, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("restrict and reduct") {
  FinStructure s = triangle();
  s.add_fresh_vertex();
  s.add_edge(1, {1, 2, 3});
  FinStructure sub = s.restrict_to(std::vector<Vertex>{0, 1, 2});
  CHECK(sub.size() == 3);
  CHECK(sub.edges().size() == 1);
  FinStructure red = s.reduct_below(1);
  CHECK(red.size() == 4);
  CHECK(red.edges().size() == 1);
  CHECK(red.edges().front().symbol == 0);
}

TEST_CASE("free join requires agreement on the common part") {
  FinStructure s1 = triangle();
  FinStructure s2(1);
  for (Vertex v : {1, 2}) s2.add_vertex(v);
  s2.add_vertex(7);
  CHECK_NOTHROW(free_join(s1, s2, std::vector<Vertex>{1, 2}));
  s2.add_edge(0, {1, 2, 7});
  FinStructure j = free_join(s1, s2, std::vector<Vertex>{1, 2});
  CHECK(j.size() == 4);
  CHECK(j.edges().size() == 2);
  // common-part disagreement: s3 has an edge inside {0,1,2} that s1 lacks
  FinStructure s3 = triangle();
  s3.add_fresh_vertex();
  s3.add_edge(1, {0, 1, 2});
  CHECK_THROWS_AS(free_join(s1, s3, std::vector<Vertex>{0, 1, 2}),
                  std::invalid_argument);
}

TEST_CASE("relabel is injective and total") {
  FinStructure s = triangle();
  std::map<Vertex, Vertex> m{{0, 10}, {1, 11}, {2, 12}};
  FinStructure r = relabel(s, m);
  CHECK(r.has_edge(0, std::vector<Vertex>{10, 11, 12}));
  std::map<Vertex, Vertex> bad{{0, 10}, {1, 10}, {2, 12}};
  CHECK_THROWS_AS(relabel(s, bad), std::invalid_argument);
}

TEST_CASE("zeta check flags nested edges") {
  FinStructure s(2);  // symbol 1 arity 4, symbol 0 arity 3
  for (int i = 0; i < 4; ++i) s.add_fresh_vertex();
  s.add_edge(0, {0, 1, 2});
  CHECK(zeta_check(s).ok);
  s.add_edge(1, {0, 1, 2, 3});
  CHECK_FALSE(zeta_check(s).ok);
}

TEST_CASE("relative type and template isomorphism") {
  FinStructure s = triangle();
  ExtensionTemplate t = rel_qf_type(s, {0, 1}, {2});
  CHECK(t.base.size() == 2);
  CHECK(t.ext.size() == 1);
  CHECK(t.link_edges().size() == 1);
  CHECK(t.base_edges().empty());
  CHECK(t.sublanguage() == std::vector<int>{0});
  // same form with different labels
  FinStructure s2(1);
  for (Vertex v : {5, 6, 7}) s2.add_vertex(v);
  s2.add_edge(0, {5, 6, 7});
  ExtensionTemplate t2 = rel_qf_type(s2, {6, 7}, {5});
  CHECK(templates_isomorphic(t, t2));
}

TEST_CASE("find_embeddings enumerates injective edge-preserving maps") {
  FinStructure host(1);
  for (int i = 0; i < 5; ++i) host.add_fresh_vertex();
  host.add_edge(0, {0, 1, 2});
  host.add_edge(0, {0, 1, 3});
  FinStructure pat = triangle();
  int count = 0;
  find_embeddings(pat, host, {}, [&](const std::map<Vertex, Vertex>&) {
    ++count;
    return true;
  });
  // each host edge hosts 3! ordered images of the pattern edge
  CHECK(count == 12);
  // anchored: pattern vertex 2 pinned to host vertex 2
  count = 0;
  find_embeddings(pat, host, {{2, 2}}, [&](const std::map<Vertex, Vertex>& m) {
    CHECK(m.at(2) == 2);
    ++count;
    return true;
  });
  CHECK(count == 2);
}

TEST_CASE("JSON round trip") {
  FinStructure s = triangle();
  s.add_edge(1, {0, 1, 2});
  FinStructure back = structure_from_json_string(to_json_string(s));
  CHECK(back.vertices() == s.vertices());
  CHECK(back.edges() == s.edges());
  CHECK(back.n() == s.n());
}
