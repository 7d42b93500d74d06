#include "amalg/amalgam.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amalg/closure.hpp"

namespace amalg {

std::string to_string(AmalgamException e) {
  switch (e) {
    case AmalgamException::kMaxFamily:
      return "MAX_FAMILY";
    case AmalgamException::kNegativeY:
      return "NEGATIVE_Y";
    case AmalgamException::kGDrop:
      return "G_DROP";
  }
  return "?";
}

namespace {

std::vector<Vertex> as_sorted(std::span<const Vertex> v) {
  return vset::sorted({v.begin(), v.end()});
}

MaybeStage capped_g_in(const FinStructure& s, std::span<const Vertex> a,
                       const MuSnapshot& snap) {
  // Only comparisons m >= j1(column) consult m inside mu, so capping at the
  // largest live j1 marker plus one is exact.
  long long cap = 1;
  for (int col : snap.column_indices())
    if (auto j1 = snap.j1(col)) cap = std::max(cap, *j1 + 1);
  auto g = g_value_below(s, as_sorted(a), cap);
  if (g) return *g;
  return kInfiniteStage;
}

// Any Y inside pool (sorted, disjoint from a) with |Y| <= bound and
// delta(Y / a) < 0 in s; exact bounded search seeded by edge choices.
std::optional<std::vector<Vertex>> small_negative_increment(const FinStructure& s,
                                                            std::span<const Vertex> a,
                                                            std::span<const Vertex> pool,
                                                            int bound) {
  std::vector<Vertex> av = as_sorted(a);
  // Quick exit: if a is strong inside a u pool, no negative increment at all.
  FinStructure sub = s.restrict_to(vset::set_union(av, pool));
  if (min_delta_over_supersets(sub, av) == sub.delta(av)) return std::nullopt;
  std::vector<Vertex> witness = min_delta_witness(sub, av);
  std::vector<Vertex> y = vset::set_difference(witness, av);
  if (static_cast<int>(y.size()) <= bound) return y;
  // The minimal global witness is too large; search small Y directly.
  std::vector<Vertex> cand(pool.begin(), pool.end());
  std::vector<Vertex> cur;
  auto rec = [&](auto&& self, size_t idx) -> std::optional<std::vector<Vertex>> {
    if (!cur.empty()) {
      std::vector<Vertex> uni = vset::set_union(av, cur);
      if (sub.delta(uni) - sub.delta(av) < 0) return cur;
    }
    if (static_cast<int>(cur.size()) >= bound || idx >= cand.size()) return std::nullopt;
    for (size_t j = idx; j < cand.size(); ++j) {
      cur.push_back(cand[j]);
      std::sort(cur.begin(), cur.end());
      auto hit = self(self, j + 1);
      cur.erase(std::find(cur.begin(), cur.end(), cand[j]));
      if (hit) return hit;
    }
    return std::nullopt;
  };
  return rec(rec, 0);
}

}  // namespace

std::vector<StrongStep> decompose_strong(const FinStructure& s,
                                         std::span<const Vertex> a,
                                         std::span<const Vertex> b) {
  std::vector<Vertex> av = as_sorted(a);
  std::vector<Vertex> bv = as_sorted(b);
  if (!vset::is_subset(av, bv)) throw std::invalid_argument("decompose_strong: a not inside b");
  FinStructure sub = s.restrict_to(bv);
  if (min_delta_over_supersets(sub, av) != sub.delta(av))
    throw std::invalid_argument("decompose_strong: a not strong in b");
  std::vector<StrongStep> steps;
  std::vector<Vertex> cur = av;
  while (cur != bv) {
    std::vector<Vertex> best_added;
    for (Vertex x : vset::set_difference(bv, cur)) {
      std::vector<Vertex> seed = vset::set_union(cur, std::vector<Vertex>{x});
      std::vector<Vertex> closed = ss_closure(sub, seed).closure;
      std::vector<Vertex> added = vset::set_difference(closed, cur);
      if (best_added.empty() || added.size() < best_added.size() ||
          (added.size() == best_added.size() && added < best_added))
        best_added = added;
    }
    StrongStep step;
    step.added = best_added;
    if (best_added.size() == 1) {
      std::vector<Vertex> with = vset::set_union(cur, best_added);
      step.free_point = sub.edge_count_inside(with) == sub.edge_count_inside(cur);
    }
    steps.push_back(step);
    cur = vset::set_union(cur, best_added);
  }
  return steps;
}

AmalgamOutcome algebraic_amalgamate(std::span<const Vertex> a, const FinStructure& b1,
                                    const FinStructure& b2, const MuSnapshot& snap) {
  std::vector<Vertex> av = as_sorted(a);
  if (!vset::is_subset(av, b1.vertices()) || !vset::is_subset(av, b2.vertices()))
    throw std::invalid_argument("algebraic_amalgamate: a not inside both sides");
  // Relabel B1's extension away from B2 where ids collide.
  std::vector<Vertex> ext1 = vset::set_difference(b1.vertices(), av);
  FinStructure left = b1;
  std::map<Vertex, Vertex> emb;
  for (Vertex v : av) emb[v] = v;
  if (!vset::disjoint(ext1, b2.vertices())) {
    std::map<Vertex, Vertex> rl;
    for (Vertex v : av) rl[v] = v;
    Vertex next = std::max(b1.empty() ? 0 : b1.max_vertex(),
                           b2.empty() ? 0 : b2.max_vertex()) +
                  1;
    for (Vertex v : ext1) rl[v] = next++;
    left = relabel(b1, rl);
    for (Vertex v : ext1) emb[v] = rl[v];
  } else {
    for (Vertex v : ext1) emb[v] = v;
  }
  std::vector<Vertex> lext = vset::set_difference(left.vertices(), av);
  if (!is_simply_algebraic(left, av, lext))
    throw std::invalid_argument("algebraic_amalgamate: B1 extension not simply algebraic over a");

  AmalgamOutcome out;
  out.embedding = emb;

  ExtensionTemplate rt = rel_qf_type(left, av, lext);

  // Case NEGATIVE_Y: some small Y in B2 \ A has negative increment over A in
  // the reduct to the link sublanguage of B1 / A.
  {
    std::vector<int> lang = rt.sublanguage();
    FinStructure reduct(b2.n());
    for (Vertex v : b2.vertices()) reduct.add_vertex(v);
    for (const Edge& e : b2.edges())
      if (std::find(lang.begin(), lang.end(), e.symbol) != lang.end())
        reduct.add_edge(e.symbol, e.verts);
    std::vector<Vertex> pool = vset::set_difference(b2.vertices(), av);
    auto y = small_negative_increment(reduct, av, pool, static_cast<int>(lext.size()));
    if (y) {
      out.exception = AmalgamException::kNegativeY;
      out.certificate.y_set = *y;
      std::ostringstream os;
      os << "negative increment over the base in the link sublanguage, |Y| = "
         << y->size();
      out.certificate.detail = os.str();
      return out;
    }
  }

  FinStructure joined = free_join(left, b2, av);

  // Case G_DROP: some msa configuration realized in B1 has a strictly
  // smaller mu bound in the join (its g value dropped).
  {
    for (const MsaWitness& w : enumerate_msa_configs(left, 0)) {
      const long long mu_b1 =
          mu_eval(snap, left, w.base, w.tmpl, capped_g_in(left, w.base, snap));
      const long long mu_e =
          mu_eval(snap, joined, w.base, w.tmpl, capped_g_in(joined, w.base, snap));
      if (mu_e < mu_b1) {
        out.exception = AmalgamException::kGDrop;
        out.certificate.base = w.base;
        out.certificate.tmpl = w.tmpl;
        std::ostringstream os;
        os << "mu bound over the base dropped " << mu_b1 << " -> " << mu_e
           << " across the join";
        out.certificate.detail = os.str();
        return out;
      }
    }
  }

  // Case MAX_FAMILY: B2 is already saturated with copies of B1's extension
  // form over its minimal base.
  {
    auto w = msa_base(left, av, lext);
    if (w) {
      FamilyCount fc = max_disjoint_family(b2, w->base, w->tmpl);
      const long long bound =
          mu_eval(snap, b2, w->base, w->tmpl, capped_g_in(b2, w->base, snap));
      if (fc.count >= bound) {
        out.exception = AmalgamException::kMaxFamily;
        out.certificate.base = w->base;
        out.certificate.tmpl = w->tmpl;
        out.certificate.family = fc.witnesses;
        std::ostringstream os;
        os << "host already carries " << fc.count << " disjoint copies (mu = " << bound
           << ")";
        out.certificate.detail = os.str();
        return out;
      }
    }
  }

  out.result = std::move(joined);
  return out;
}

namespace {

// Maps tmpl.ext injectively onto the vertex set `target` of the host so
// that every link edge (anchored by base_map) lands on a host edge.
std::optional<std::map<Vertex, Vertex>> copy_assignment(
    const FinStructure& host, const ExtensionTemplate& tmpl,
    const std::map<Vertex, Vertex>& base_map, const std::vector<Vertex>& target) {
  if (target.size() != tmpl.ext.size()) return std::nullopt;
  std::map<Vertex, Vertex> assign = base_map;
  std::vector<char> used(target.size(), 0);
  const std::vector<Edge> links = tmpl.link_edges();
  auto rec = [&](auto&& self, size_t idx) -> bool {
    if (idx == tmpl.ext.size()) return true;
    Vertex pv = tmpl.ext[idx];
    for (size_t j = 0; j < target.size(); ++j) {
      if (used[j]) continue;
      assign[pv] = target[j];
      bool ok = true;
      for (const Edge& e : links) {
        bool ready = true;
        for (Vertex v : e.verts) ready = ready && assign.count(v) > 0;
        if (!ready) continue;
        std::vector<Vertex> img;
        for (Vertex v : e.verts) img.push_back(assign.at(v));
        img = vset::sorted(std::move(img));
        if (img.size() != e.verts.size() || !host.has_edge(e.symbol, img)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        used[j] = 1;
        if (self(self, idx + 1)) return true;
        used[j] = 0;
      }
      assign.erase(pv);
    }
    return false;
  };
  if (rec(rec, 0)) {
    std::map<Vertex, Vertex> ext_only;
    for (Vertex v : tmpl.ext) ext_only[v] = assign.at(v);
    return ext_only;
  }
  return std::nullopt;
}

}  // namespace

StrongAmalgamResult strong_amalgamate(std::span<const Vertex> a, const FinStructure& b1,
                                      const FinStructure& b2, const MuSnapshot& snap) {
  std::vector<Vertex> av = as_sorted(a);
  if (!is_strong(b1, av) || !is_strong(b2, av))
    throw std::invalid_argument("strong_amalgamate: a must be strong in both sides");

  StrongAmalgamResult res;
  res.amalgam = b2;
  for (Vertex v : av) res.g[v] = v;

  const std::vector<StrongStep> steps = decompose_strong(b1, av, b1.vertices());
  std::vector<Vertex> done = av;  // processed b1 vertices (b1 labels)

  for (const StrongStep& step : steps) {
    // Image of the processed part inside the current amalgam.
    std::set<Vertex> im_set;
    for (Vertex v : done) im_set.insert(res.g.at(v));
    std::vector<Vertex> im(im_set.begin(), im_set.end());

    if (step.free_point) {
      FinStructure next = res.amalgam;
      Vertex fresh = next.add_fresh_vertex();
      res.g[step.added.front()] = fresh;
      res.amalgam = std::move(next);
      res.trace.push_back("AMALGAM free point");
      done = vset::set_union(done, step.added);
      continue;
    }

    // The step is minimally simply algebraic over a small base inside the
    // processed part; amalgamating over that base (rather than the whole
    // image) keeps the left side small and yields the same free join, since
    // the step's edges only touch the minimal base.
    std::vector<Vertex> scope = vset::set_union(done, step.added);
    const FinStructure sub = b1.restrict_to(scope);
    auto wit = msa_base(sub, done, step.added);
    if (!wit)
      throw std::runtime_error("strong_amalgamate: step not simply algebraic");
    std::set<Vertex> fim_set;
    for (Vertex v : wit->base) fim_set.insert(res.g.at(v));
    std::vector<Vertex> fim(fim_set.begin(), fim_set.end());

    FinStructure stage_side(b1.n());
    for (Vertex v : fim) stage_side.add_vertex(v);
    std::map<Vertex, Vertex> step_map;  // b1 label -> stage_side label
    for (Vertex v : wit->base) step_map[v] = res.g.at(v);
    Vertex next_id = res.amalgam.empty() ? 0 : res.amalgam.max_vertex() + 1;
    for (Vertex v : step.added) {
      step_map[v] = next_id;
      stage_side.add_vertex(next_id);
      ++next_id;
    }
    // Base-internal facts come from the amalgam (the join requires exact
    // agreement on the common part); only edges meeting the new vertices are
    // pulled through from b1.
    const FinStructure fim_part = res.amalgam.restrict_to(fim);
    for (const Edge& e : fim_part.edges()) stage_side.add_edge(e.symbol, e.verts);
    for (const Edge& e : sub.edges()) {
      bool meets_new = false;
      for (Vertex v : e.verts)
        meets_new = meets_new || vset::contains(step.added, v);
      if (!meets_new) continue;
      std::vector<Vertex> img;
      for (Vertex v : e.verts) img.push_back(step_map.at(v));
      img = vset::sorted(std::move(img));
      if (img.size() != e.verts.size())
        throw std::runtime_error("strong_amalgamate: collapsed step edge");
      stage_side.add_edge(e.symbol, img);
    }

    AmalgamOutcome out = algebraic_amalgamate(fim, stage_side, res.amalgam, snap);
    if (out.accepted()) {
      res.amalgam = std::move(*out.result);
      for (Vertex v : step.added) res.g[v] = out.embedding.at(step_map.at(v));
      res.trace.push_back("AMALGAM algebraic step |added| = " +
                          std::to_string(step.added.size()));
    } else if (out.exception == AmalgamException::kMaxFamily) {
      // Reuse the lexicographically least existing copy disjoint from the
      // processed image.
      std::vector<std::vector<Vertex>> copies = out.certificate.family;
      std::sort(copies.begin(), copies.end());
      std::optional<std::map<Vertex, Vertex>> hit;
      for (const auto& c : copies) {
        if (!vset::disjoint(c, im)) continue;
        std::map<Vertex, Vertex> base_map;
        const ExtensionTemplate& tmpl = *out.certificate.tmpl;
        for (size_t j = 0; j < tmpl.base.size(); ++j)
          base_map[tmpl.base[j]] = out.certificate.base[j];
        hit = copy_assignment(res.amalgam, tmpl, base_map, c);
        if (hit) {
          // tmpl.ext entries are the fresh stage_side ids (sorted), so pull
          // each original b1 vertex through step_map.
          for (Vertex v : step.added) res.g[v] = hit->at(step_map.at(v));
          break;
        }
      }
      if (!hit)
        throw std::runtime_error(
            "strong_amalgamate: saturated host but no reusable copy");
      ++res.reused_copies;
      res.trace.push_back("REUSE existing copy for step |added| = " +
                          std::to_string(step.added.size()));
    } else {
      throw std::runtime_error("strong_amalgamate: unexpected exception " +
                               to_string(*out.exception) + " (" +
                               out.certificate.detail + ")");
    }
    done = vset::set_union(done, step.added);
  }

  if (!is_strong(res.amalgam, b2.vertices()))
    throw std::runtime_error("strong_amalgamate: host side lost strength");
  std::set<Vertex> g_im;
  for (auto& [k, v] : res.g) g_im.insert(v);
  std::vector<Vertex> g_imv(g_im.begin(), g_im.end());
  if (!is_strong(res.amalgam, g_imv))
    throw std::runtime_error("strong_amalgamate: image side lost strength");
  return res;
}

}  // namespace amalg
