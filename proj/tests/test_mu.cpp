#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "amalg/gadgets.hpp"
#include "amalg/mu.hpp"
#include "amalg/structure.hpp"
#include "doctest.h"

using namespace amalg;

TEST_CASE("pairing code values and monotonicity") {
  CHECK(pair_code(0, 0) == 0);
  CHECK(pair_code(0, 1) == 2);
  CHECK(pair_code(0, 2) == 5);
  CHECK(pair_code(0, 3) == 9);
  for (long long i = 0; i < 5; ++i)
    for (long long j = 0; j < 5; ++j) {
      CHECK(pair_code(i + 1, j) > pair_code(i, j));
      CHECK(pair_code(i, j + 1) > pair_code(i, j));
    }
}

TEST_CASE("snapshot advance and marker bookkeeping") {
  MuSnapshot s;
  s.n = 1;
  CHECK_FALSE(s.has_markers(0));
  s = s.advanced(0);
  CHECK_FALSE(s.has_markers(0));
  CHECK_FALSE(s.j1(0).has_value());
  s = s.advanced(0);
  REQUIRE(s.has_markers(0));
  CHECK(*s.j0(0) == pair_code(0, 0));
  CHECK(*s.j1(0) == pair_code(0, 1));
  CHECK(s.s0(0).empty());
  s = s.advanced(0);
  CHECK(*s.j0(0) == pair_code(0, 1));
  CHECK(*s.j1(0) == pair_code(0, 2));
  CHECK(s.s0(0) == std::vector<long long>{pair_code(0, 0)});
  // a second column interleaves via the shared stage counter
  s = s.advanced(3);
  CHECK(s.columns.at(3).size() == 1);
  CHECK(s.column_indices() == std::vector<int>{0, 3});
}

TEST_CASE("seeded snapshots have live markers") {
  MuSnapshot s = MuSnapshot::seeded(1, {0, 2});
  CHECK(s.has_markers(0));
  CHECK(s.has_markers(2));
  CHECK_FALSE(s.has_markers(1));
  CHECK(s.s0_all().empty());
}

TEST_CASE("mu evaluates to |A|+4 exactly on live omega forms") {
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  // the j0 template: bonus granted unconditionally when R_1 holds on the base
  ExtensionTemplate om0 = omega(*snap.j0(0), 1);
  FinStructure s(1);
  for (int i = 0; i < 3; ++i) s.add_fresh_vertex();
  const std::vector<Vertex> b{0, 1, 2};
  SUBCASE("without the relation the bound is |A|+3") {
    CHECK(mu_eval(snap, s, b, om0, 0) == 6);
  }
  SUBCASE("with the relation the bound is |A|+4") {
    s.add_edge(1, {0, 1, 2});
    CHECK(mu_eval(snap, s, b, om0, 0) == 7);
  }
  SUBCASE("the j1 template needs the stage to reach its code") {
    s.add_edge(1, {0, 1, 2});
    ExtensionTemplate om1 = omega(*snap.j1(0), 1);
    CHECK(mu_eval(snap, s, b, om1, 0) == 6);
    CHECK(mu_eval(snap, s, b, om1, *snap.j1(0)) == 7);
    CHECK(mu_eval(snap, s, b, om1, kInfiniteStage) == 7);
  }
}

TEST_CASE("mu rejects non-msa templates") {
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  // two disconnected free points over a base are not simply algebraic
  FinStructure p(1);
  Vertex a = p.add_fresh_vertex();
  Vertex x = p.add_fresh_vertex();
  ExtensionTemplate t;
  t.pattern = p;
  t.base = {a};
  t.ext = {x};
  FinStructure s(1);
  s.add_fresh_vertex();
  const std::vector<Vertex> one{0};
  CHECK_THROWS_AS(mu_eval(snap, s, one, t, 0), std::invalid_argument);
}

TEST_CASE("defunct detection follows the g threshold") {
  // L_5 with a decoration: g of the decorated tuple is finite and small,
  // so late codes make the fact defunct.
  Gadget l5 = build_path(PathKind::L, 5);
  FinStructure s = l5.structure;
  Vertex a = s.add_fresh_vertex();
  s.add_edge(1, {0, 1, a});
  const Edge occ{1, {0, 1, a}};
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  CHECK_FALSE(is_defunct(s, occ, snap));  // last code 2 is below g
  for (int i = 0; i < 6; ++i) snap = snap.advanced(0);
  CHECK(is_defunct(s, occ, snap));  // last code far above g
  // symbol 0 has no column
  CHECK_THROWS_AS(is_defunct(s, Edge{0, {0, 1, 2}}, snap), std::invalid_argument);
}

TEST_CASE("snapshot JSON round trip") {
  MuSnapshot s = MuSnapshot::seeded(2, {0, 1});
  s = s.advanced(0);
  MuSnapshot back = snapshot_from_json_string(snapshot_to_json_string(s));
  CHECK(back.n == s.n);
  CHECK(back.stage == s.stage);
  CHECK(back.columns == s.columns);
}
