#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "amalg/extension.hpp"
#include "amalg/gadgets.hpp"
#include "amalg/mu.hpp"
#include "amalg/oracle.hpp"
#include "amalg/structure.hpp"
#include "doctest.h"

using namespace amalg;

namespace {

// base pair plus m pendant vertices, each hanging on one symbol-0 edge
FinStructure fan(int m) {
  FinStructure s(1);
  s.add_fresh_vertex();
  s.add_fresh_vertex();
  for (int i = 0; i < m; ++i) {
    Vertex c = s.add_fresh_vertex();
    s.add_edge(0, {0, 1, c});
  }
  return s;
}

ExtensionTemplate pendant_template() {
  FinStructure p(1);
  Vertex a = p.add_fresh_vertex();
  Vertex b = p.add_fresh_vertex();
  Vertex c = p.add_fresh_vertex();
  p.add_edge(0, {a, b, c});
  ExtensionTemplate t;
  t.pattern = std::move(p);
  t.base = {a, b};
  t.ext = {c};
  return t;
}

}  // namespace

TEST_CASE("simple algebraicity of the catalog extensions") {
  Gadget dh = build_D_hat(2, 4);
  CHECK(is_simply_algebraic(dh.structure, dh.base, dh.ext));
  Gadget h5 = build_path(PathKind::H, 5);
  CHECK(is_simply_algebraic(h5.structure, h5.base, h5.ext));
  // D_t has increment -1, hence not simply algebraic
  Gadget d = build_D(2, 4);
  CHECK_FALSE(is_simply_algebraic(d.structure, d.base, d.ext));
  // a proper zero sub-extension breaks minimal decomposition into one step:
  // two pendants over the same pair are s.a. separately, not jointly
  FinStructure two = fan(2);
  CHECK_FALSE(is_simply_algebraic(two, std::vector<Vertex>{0, 1},
                                  std::vector<Vertex>{2, 3}));
  CHECK(is_simply_algebraic(two, std::vector<Vertex>{0, 1}, std::vector<Vertex>{2}));
}

TEST_CASE("msa base is the link-touched part of the base") {
  FinStructure s = fan(1);
  s.add_fresh_vertex();  // an untouched extra base vertex
  auto w = msa_base(s, std::vector<Vertex>{0, 1, 3}, std::vector<Vertex>{2});
  REQUIRE(w.has_value());
  CHECK(w->base == std::vector<Vertex>{0, 1});
  CHECK(w->extension == std::vector<Vertex>{2});
  Gadget dh = build_D_hat(2, 5);
  auto wd = msa_base(dh.structure, dh.base, dh.ext);
  REQUIRE(wd.has_value());
  CHECK(wd->base == vset::sorted(dh.base));  // every base vertex is touched
}

TEST_CASE("form matching checks base type and link containment") {
  FinStructure s = fan(3);
  ExtensionTemplate t = pendant_template();
  CHECK(matches_form(s, std::vector<Vertex>{0, 1}, std::vector<Vertex>{2}, t));
  // no edge realizes the link pattern over this anchor
  CHECK_FALSE(matches_form(s, std::vector<Vertex>{0, 3}, std::vector<Vertex>{2}, t));

  // base type: a template whose base triple carries an R_1 fact
  FinStructure p(1);
  Vertex a = p.add_fresh_vertex();
  Vertex b = p.add_fresh_vertex();
  Vertex d = p.add_fresh_vertex();
  Vertex c = p.add_fresh_vertex();
  p.add_edge(1, {a, b, d});
  p.add_edge(0, {a, b, c});
  ExtensionTemplate t3{.pattern = p, .base = {a, b, d}, .ext = {c}};

  FinStructure h(1);  // host missing the base R_1 fact
  for (int i = 0; i < 4; ++i) h.add_fresh_vertex();
  h.add_edge(0, {0, 1, 3});
  MatchOptions loose;
  loose.check_base_type = false;
  CHECK_FALSE(matches_form(h, std::vector<Vertex>{0, 1, 2}, std::vector<Vertex>{3}, t3));
  CHECK(matches_form(h, std::vector<Vertex>{0, 1, 2}, std::vector<Vertex>{3}, t3, loose));
  h.add_edge(1, {0, 1, 2});
  CHECK(matches_form(h, std::vector<Vertex>{0, 1, 2}, std::vector<Vertex>{3}, t3));
}

TEST_CASE("disjoint family counting agrees with the oracle") {
  ExtensionTemplate t = pendant_template();
  for (int m = 1; m <= 5; ++m) {
    FinStructure s = fan(m);
    FamilyCount fc = max_disjoint_family(s, std::vector<Vertex>{0, 1}, t);
    CHECK(fc.count == m);
    CHECK(fc.count ==
          oracle::brute_max_disjoint_family(s, std::vector<Vertex>{0, 1}, t));
  }
  // overlapping copies: pendants sharing their extension vertex pack once
  FinStructure s = fan(1);
  FamilyCount fc = max_disjoint_family(s, std::vector<Vertex>{0, 1}, t);
  CHECK(fc.count == 1);
  CHECK(fc.witnesses.size() == 1);
}

TEST_CASE("msa configuration enumeration finds the pendant forms") {
  FinStructure s = fan(2);
  auto configs = enumerate_msa_configs(s, 0);
  // pendants {2} and {3} over base {0,1}; no larger configuration exists
  int pendants = 0;
  for (const auto& w : configs)
    if (w.extension.size() == 1 && w.base == std::vector<Vertex>{0, 1}) ++pendants;
  CHECK(pendants == 2);
  CHECK_THROWS_AS(enumerate_msa_configs(s, 0, 5), std::runtime_error);
}

TEST_CASE("class membership accepts the catalog and rejects violations") {
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  SUBCASE("negative delta is rejected with a witness") {
    FinStructure s(1);
    for (int i = 0; i < 5; ++i) s.add_fresh_vertex();
    for (Vertex a = 0; a < 5; ++a)
      for (Vertex b = a + 1; b < 5; ++b)
        for (Vertex c = b + 1; c < 5; ++c) s.add_edge(0, {a, b, c});
    ClassVerdict v = in_class(s, snap);
    REQUIRE_FALSE(v.accepted);
    CHECK(v.violation->kind == ClassViolation::Kind::kNegativeDelta);
  }
  SUBCASE("an over-packed family is rejected with the family certificate") {
    // mu for the pendant form over an edge-free pair is |A|+3 = 5
    FinStructure s = fan(6);
    ClassVerdict v = in_class(s, snap);
    REQUIRE_FALSE(v.accepted);
    REQUIRE(v.violation->kind == ClassViolation::Kind::kMuBound);
    CHECK(v.violation->bound == 5);
    CHECK(v.violation->family.size() == 6);
    CHECK(in_class(fan(5), snap).accepted);
  }
  SUBCASE("catalog-only mode still sees catalog violations") {
    InClassOptions opts;
    opts.catalog_only = true;
    opts.extra_templates = {pendant_template()};
    CHECK_FALSE(in_class(fan(6), snap, opts).accepted);
    CHECK(in_class(fan(5), snap, opts).accepted);
  }
}

TEST_CASE("the relation bonus lifts the bound by one") {
  MuSnapshot snap = MuSnapshot::seeded(1, {0});
  ExtensionTemplate om0 = omega(*snap.j0(0), 1);
  // omega copies over a base carrying R_1: the bound is |A|+4 = 7
  auto host = [&](int copies) {
    FinStructure s(1);
    std::vector<Vertex> base;
    for (int i = 0; i < 3; ++i) base.push_back(s.add_fresh_vertex());
    s.add_edge(1, base);
    for (int copy = 0; copy < copies; ++copy) {
      std::map<Vertex, Vertex> rl;
      for (size_t j = 0; j < om0.base.size(); ++j) rl[om0.base[j]] = base[j];
      for (Vertex v : om0.ext) rl[v] = s.add_fresh_vertex();
      for (const Edge& e : om0.link_edges()) {
        std::vector<Vertex> img;
        for (Vertex v : e.verts) img.push_back(rl.at(v));
        s.add_edge(e.symbol, vset::sorted(std::move(img)));
      }
    }
    return std::pair{s, base};
  };
  auto [s7, b7] = host(7);
  std::vector<Vertex> first_ext;
  for (Vertex v : s7.vertices())
    if (!vset::contains(vset::sorted(b7), v) && first_ext.size() < om0.ext.size())
      first_ext.push_back(v);
  InClassOptions opts;
  opts.catalog_only = true;
  opts.extra_templates = {rel_qf_type(s7, b7, first_ext)};
  CHECK(in_class(s7, snap, opts).accepted);
  auto [s8, b8] = host(8);
  ClassVerdict v = in_class(s8, snap, opts);
  REQUIRE_FALSE(v.accepted);
  REQUIRE(v.violation->kind == ClassViolation::Kind::kMuBound);
  CHECK(v.violation->bound == 7);
}
