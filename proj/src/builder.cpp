#include "amalg/builder.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amalg/amalgam.hpp"
#include "amalg/closure.hpp"
#include "amalg/gadgets.hpp"

#include "json.hpp"

namespace amalg {

namespace {

void log_event(StageState& state, const std::string& kind, const std::string& detail) {
  state.log.push_back(StageEvent{state.stage, kind, detail});
}

std::string tuple_str(std::span<const Vertex> t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ")";
  return os.str();
}

// The active audit catalog: for every column with live markers, the single
// R_i edge form over an edge-free pair and both live omega templates.
std::vector<ExtensionTemplate> audit_catalog(const StageState& state) {
  std::vector<ExtensionTemplate> out;
  const int n = state.config.n;
  for (int col : state.snap.column_indices()) {
    if (!state.snap.has_markers(col)) continue;
    {
      // base tuple of length n + 1, one fresh point, one R_col edge
      FinStructure p(n);
      std::vector<Vertex> base, ext;
      for (int i = 0; i < n + 1; ++i) base.push_back(p.add_fresh_vertex());
      ext.push_back(p.add_fresh_vertex());
      std::vector<Vertex> ev = base;
      ev.push_back(ext[0]);
      p.add_edge(col + 1, ev);
      ExtensionTemplate t;
      t.pattern = std::move(p);
      t.base = base;
      t.ext = ext;
      out.push_back(std::move(t));
    }
    out.push_back(omega(*state.snap.j0(col), n));
    out.push_back(omega(*state.snap.j1(col), n));
  }
  return out;
}

void audit_state(StageState& state, const char* where) {
  if (state.config.audit_level < 1) return;
  InClassOptions opts;
  opts.ext_size_cap = 3;
  opts.extra_templates = audit_catalog(state);
  opts.work_budget = state.config.audit_work_budget;
  // Realized-form enumeration is exhaustive only while the structure is
  // small; past that the audit covers the active catalog (every form the
  // schedule instantiates) plus the global delta / zeta checks.
  opts.catalog_only = state.n.size() > 40 && state.config.audit_level < 2;
  ClassVerdict v = in_class(state.n, state.snap, opts);
  if (!v.accepted) {
    throw std::runtime_error(std::string("builder invariant violation (") + where +
                             ", stage " + std::to_string(state.stage) +
                             "): " + v.violation->describe());
  }
}

// Relative-dimension agreement between two structures sharing old_verts:
// exhaustive when old_verts is small, tiered (all small X plus seeded random
// X) otherwise.  Returns a description of the first disagreement.
std::optional<std::string> delta_preservation_gap(const FinStructure& before,
                                                  const FinStructure& after,
                                                  const std::vector<Vertex>& old_verts,
                                                  int exhaustive_limit,
                                                  std::uint64_t seed) {
  auto gap_at = [&](const std::vector<Vertex>& x) -> std::optional<std::string> {
    if (min_delta_over_supersets(before, x) != min_delta_over_supersets(after, x)) {
      return "delta(X, .) changed for X = " + tuple_str(x);
    }
    return std::nullopt;
  };
  const size_t m = old_verts.size();
  if (static_cast<int>(m) <= exhaustive_limit) {
    std::vector<Vertex> x;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      x.clear();
      for (size_t j = 0; j < m; ++j)
        if (mask & (1ull << j)) x.push_back(old_verts[j]);
      if (auto g = gap_at(x)) return g;
    }
    return std::nullopt;
  }
  // all singletons and pairs
  for (size_t i = 0; i < m; ++i) {
    if (auto g = gap_at({old_verts[i]})) return g;
    for (size_t j = i + 1; j < m; ++j)
      if (auto g = gap_at({old_verts[i], old_verts[j]})) return g;
  }
  // seeded random subsets of mixed sizes
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t size = 3 + rng() % std::min<size_t>(m - 2, 8);
    std::set<Vertex> pick;
    while (pick.size() < size) pick.insert(old_verts[rng() % m]);
    std::vector<Vertex> x(pick.begin(), pick.end());
    if (auto g = gap_at(x)) return g;
  }
  return std::nullopt;
}

}  // namespace

StageState make_initial_state(const BuilderConfig& config) {
  StageState st;
  st.n = FinStructure(config.n);
  st.snap = MuSnapshot{};
  st.snap.n = config.n;
  st.config = config;
  return st;
}

void schedule(StageState& state) {
  int emitted = 0;
  auto have_label = [&](const std::string& label) {
    for (const Requirement& r : state.queue)
      if (r.label == label) return true;
    return false;
  };
  auto emit = [&](Requirement r) {
    if (emitted >= state.config.max_new_requirements_per_stage) return false;
    r.birth_stage = state.stage;
    log_event(state, "SCHEDULE", r.label);
    state.queue.push_back(std::move(r));
    ++emitted;
    return true;
  };
  const int n = state.config.n;

  // Rule A: two seed points, at stages 0 and 1.
  for (int which = 0; which < 2; ++which) {
    std::string label = "free-point-" + std::to_string(which);
    if (state.stage >= which && !have_label(label)) {
      Requirement r;
      FinStructure p(n);
      Vertex v = p.add_fresh_vertex();
      r.tmpl.pattern = std::move(p);
      r.tmpl.ext = {v};
      r.label = label;
      emit(std::move(r));
    }
  }

  // Rule B: for each pair of isolated vertices, a full bundle of n + 4
  // single-R_i-edge extensions for the lowest live column.
  std::vector<int> live;
  for (int col : state.snap.column_indices())
    if (state.snap.has_markers(col)) live.push_back(col);
  if (!live.empty()) {
    const int col = live.front();
    std::vector<Vertex> isolated;
    for (Vertex v : state.n.vertices())
      if (state.n.edges_at(v).empty()) isolated.push_back(v);
    const int bundle = n + 4;  // exactly mu = |A| + 3 copies for an (n+1)-base
    for (size_t i = 0; i + n < isolated.size() && emitted < state.config.max_new_requirements_per_stage; ++i) {
      // base tuple: n + 1 consecutive isolated vertices starting at i
      std::vector<Vertex> base(isolated.begin() + static_cast<long>(i),
                               isolated.begin() + static_cast<long>(i) + n + 1);
      std::string label = "edge-bundle-" + tuple_str(base);
      if (have_label(label)) continue;
      FinStructure p(n);
      std::vector<Vertex> pb, pe;
      for (int j = 0; j < n + 1; ++j) pb.push_back(p.add_fresh_vertex());
      for (int j = 0; j < bundle; ++j) {
        Vertex c = p.add_fresh_vertex();
        pe.push_back(c);
        std::vector<Vertex> ev = pb;
        ev.push_back(c);
        p.add_edge(col + 1, ev);
      }
      if (static_cast<long long>(p.size()) > state.stage) continue;  // size cap
      Requirement r;
      r.tmpl.pattern = std::move(p);
      r.tmpl.base = pb;
      r.tmpl.ext = pe;
      r.base = base;
      r.label = label;
      emit(std::move(r));
    }
  }

  // Rule C: for each stored R_i fact, a bundle of n + 6 omega_{<i,j0>}
  // extensions over its (sorted) tuple.
  for (const Edge& e : state.n.edges()) {
    if (e.symbol == 0) continue;
    const int col = e.symbol - 1;
    if (!state.snap.has_markers(col)) continue;
    if (emitted >= state.config.max_new_requirements_per_stage) break;
    std::string label = "omega-bundle-" + std::to_string(e.symbol) + tuple_str(e.verts);
    if (have_label(label)) continue;
    ExtensionTemplate om = omega(*state.snap.j0(col), n);
    const int copies = n + 6;
    FinStructure p(n);
    std::vector<Vertex> pb, pe;
    for (size_t j = 0; j < om.base.size(); ++j) pb.push_back(p.add_fresh_vertex());
    p.add_edge(e.symbol, pb);  // the fact lives on the base
    for (int c = 0; c < copies; ++c) {
      std::map<Vertex, Vertex> rl;
      for (size_t j = 0; j < om.base.size(); ++j) rl[om.base[j]] = pb[j];
      for (Vertex v : om.ext) {
        Vertex f = p.add_fresh_vertex();
        rl[v] = f;
        pe.push_back(f);
      }
      for (const Edge& oe : om.pattern.edges()) {
        bool meets_ext = false;
        for (Vertex v : oe.verts)
          meets_ext = meets_ext || vset::contains(om.ext, v);
        if (!meets_ext) continue;
        std::vector<Vertex> img;
        for (Vertex v : oe.verts) img.push_back(rl.at(v));
        p.add_edge(oe.symbol, img);
      }
    }
    if (static_cast<long long>(p.size()) > state.stage) continue;  // size cap
    Requirement r;
    r.tmpl.pattern = std::move(p);
    r.tmpl.base = pb;
    r.tmpl.ext = pe;
    r.base = e.verts;
    r.label = label;
    emit(std::move(r));
  }
}

void cleanup(StageState& state, const MuSnapshot& before, int advanced_column) {
  const int symbol = advanced_column + 1;
  std::vector<Edge> defunct;
  for (const Edge& e : state.n.edges())
    if (e.symbol == symbol && is_defunct(state.n, e, before)) defunct.push_back(e);
  if (defunct.empty()) return;
  // least occurrence: by max vertex id, then lexicographically
  std::sort(defunct.begin(), defunct.end(), [](const Edge& a, const Edge& b) {
    return std::make_pair(a.verts.back(), a.verts) <
           std::make_pair(b.verts.back(), b.verts);
  });
  const Edge target = defunct.front();
  const FinStructure before_removal = state.n;
  const std::vector<Vertex> old_verts = state.n.vertices();

  for (int t = 3;; t += 2) {
    if (t > 3 + 8)
      throw std::runtime_error("cleanup: no gadget parameter restored all dimensions");
    FinStructure repaired = before_removal;
    repaired.remove_edge(target);
    repaired = drop_dimension(repaired, target.verts, t);
    auto gap = delta_preservation_gap(before_removal, repaired, old_verts,
                                      state.config.exhaustive_delta_check_limit,
                                      state.config.seed ^ static_cast<std::uint64_t>(
                                                              state.stage * 1315423911ull));
    if (gap) {
      log_event(state, "CLEANUP", "gadget t = " + std::to_string(t) +
                                      " rejected: " + *gap);
      continue;
    }
    state.n = std::move(repaired);
    state.tombstones.push_back(Tombstone{target.symbol, target.verts, state.stage});
    log_event(state, "CLEANUP", "removed symbol " + std::to_string(target.symbol) +
                                    " occurrence " + tuple_str(target.verts) +
                                    ", repaired with t = " + std::to_string(t));
    return;
  }
}

namespace {

void satisfy(StageState& state, Requirement& req) {
  // Stale requirements (base no longer strong, or base facts changed since
  // scheduling) are skipped with a logged event rather than forced.
  std::vector<Vertex> aset = vset::sorted(req.base);
  for (Vertex v : aset)
    if (!state.n.has_vertex(v)) {
      log_event(state, "SKIP", req.label + ": base vertex missing");
      req.status = RequirementStatus::kSatisfied;
      return;
    }
  if (!is_strong(state.n, aset)) {
    log_event(state, "SKIP", req.label + ": base not strong");
    req.status = RequirementStatus::kSatisfied;
    return;
  }
  // Build B1 over the base with fresh extension ids.
  std::map<Vertex, Vertex> rl;
  for (size_t j = 0; j < req.tmpl.base.size(); ++j) rl[req.tmpl.base[j]] = req.base[j];
  Vertex next = state.n.empty() ? 0 : state.n.max_vertex() + 1;
  for (Vertex v : req.tmpl.ext) rl[v] = next++;
  FinStructure b1 = relabel(req.tmpl.pattern, rl);
  // The join needs exact agreement on the base facts.
  std::vector<Edge> host_facts = state.n.restrict_to(aset).edges();
  std::vector<Edge> tmpl_facts = b1.restrict_to(aset).edges();
  std::sort(host_facts.begin(), host_facts.end());
  std::sort(tmpl_facts.begin(), tmpl_facts.end());
  if (host_facts != tmpl_facts) {
    log_event(state, "SKIP", req.label + ": base facts changed");
    req.status = RequirementStatus::kSatisfied;
    return;
  }
  StrongAmalgamResult res = strong_amalgamate(aset, b1, state.n, state.snap);
  state.n = std::move(res.amalgam);
  req.status = RequirementStatus::kSatisfied;
  for (const std::string& line : res.trace)
    log_event(state, line.substr(0, line.find(' ')),
              req.label + ": " + line.substr(line.find(' ') + 1));
}

}  // namespace

void run_stage(StageState& state) {
  log_event(state, "STAGE", std::to_string(state.stage));
  // 1. advance the snapshot
  int column;
  if (state.stage < static_cast<long long>(state.config.script.size())) {
    column = state.config.script[state.stage];
  } else {
    column = 0;
    for (int c : state.snap.column_indices()) column = std::max(column, c + 1);
  }
  const MuSnapshot before = state.snap;
  state.snap = state.snap.advanced(column);
  log_event(state, "ENUM", "column " + std::to_string(column) + " code " +
                               std::to_string(state.snap.columns.at(column).back()));
  // 2. clean-up for the advanced column
  cleanup(state, before, column);
  // 3. schedule new requirements
  schedule(state);
  // 4. satisfy the first `stage` pending requirements
  long long quota = state.stage;
  for (Requirement& r : state.queue) {
    if (quota == 0) break;
    if (r.status != RequirementStatus::kPending) continue;
    const std::vector<Vertex> old_verts = state.n.vertices();
    satisfy(state, r);
    --quota;
    if (state.config.audit_level >= 0 && !old_verts.empty()) {
      // strong growth preserves every old relative dimension
      if (!is_strong(state.n, old_verts))
        throw std::runtime_error("builder: previous stage not strong after amalgamation");
    }
  }
  audit_state(state, "post-stage");
  ++state.stage;
}

StageState run_build(const BuilderConfig& config) {
  StageState st = make_initial_state(config);
  namespace fs = std::filesystem;
  const bool dump = !config.out_dir.empty();
  if (dump) fs::create_directories(config.out_dir);
  for (long long s = 0; s < config.stages; ++s) {
    run_stage(st);
    if (dump) {
      std::ostringstream name;
      name << "stage_" << s << ".json";
      std::ofstream f(fs::path(config.out_dir) / name.str());
      f << stage_to_json_string(st) << "\n";
    }
  }
  if (dump) {
    std::ofstream ev(fs::path(config.out_dir) / "events.log");
    for (const StageEvent& e : st.log)
      ev << e.stage << " " << e.kind << " " << e.detail << "\n";
    std::ofstream tb(fs::path(config.out_dir) / "tombstones.log");
    for (const Tombstone& t : st.tombstones) {
      tb << t.stage << " " << t.symbol;
      for (Vertex v : t.verts) tb << " " << v;
      tb << "\n";
    }
  }
  return st;
}

std::vector<HatVerdict> hat_expansion(const StageState& state) {
  std::vector<HatVerdict> out;
  const int n = state.config.n;
  for (int col : state.snap.column_indices()) {
    if (!state.snap.has_markers(col)) continue;
    ExtensionTemplate om = omega(*state.snap.j0(col), n);
    // tuples of interest: stored facts plus bases of pattern matches
    std::set<std::vector<Vertex>> tuples;
    for (const Edge& e : state.n.edges())
      if (e.symbol == col + 1) tuples.insert(e.verts);
    find_embeddings(om.pattern, state.n, {}, [&](const std::map<Vertex, Vertex>& emb) {
      std::vector<Vertex> img;
      for (Vertex v : om.base) img.push_back(emb.at(v));
      tuples.insert(vset::sorted(std::move(img)));
      return true;
    });
    MatchOptions opts;
    opts.check_base_type = false;  // the definitional expansion counts bare matches
    for (const std::vector<Vertex>& tup : tuples) {
      HatVerdict v;
      v.column = col;
      v.tuple = tup;
      v.relation_present = state.n.has_edge(col + 1, tup);
      // best count over the tuple's orderings (the formula quantifies over
      // an ordered tuple)
      std::vector<Vertex> perm = tup;
      int best = 0;
      std::sort(perm.begin(), perm.end());
      do {
        best = std::max(best,
                        static_cast<int>(max_disjoint_family(state.n, perm, om, opts).count));
      } while (std::next_permutation(perm.begin(), perm.end()));
      v.family_count = best;
      v.defined = best >= n + 6;
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<Vertex> extract_submodel(const StageState& state,
                                     std::span<const Vertex> basis, int size_budget) {
  std::vector<Vertex> bv = vset::sorted({basis.begin(), basis.end()});
  if (!bv.empty() && dim(state.n, bv) != static_cast<long long>(bv.size()))
    throw std::invalid_argument("extract_submodel: basis not independent");
  const long long base_dim = bv.empty() ? 0 : dim(state.n, bv);
  std::vector<Vertex> out;
  for (Vertex x : state.n.vertices()) {
    std::vector<Vertex> seed = vset::set_union(bv, std::vector<Vertex>{x});
    ClosureReport rep = ss_closure(state.n, seed);
    if (rep.delta_value == base_dim &&
        static_cast<int>(rep.closure.size()) <= size_budget)
      out.push_back(x);
  }
  return out;
}

std::string stage_to_json_string(const StageState& state) {
  nlohmann::json j;
  j["stage"] = state.stage;
  j["structure"] = nlohmann::json::parse(to_json_string(state.n));
  j["snapshot"] = nlohmann::json::parse(snapshot_to_json_string(state.snap));
  nlohmann::json q = nlohmann::json::array();
  for (const Requirement& r : state.queue) {
    nlohmann::json e;
    e["label"] = r.label;
    e["birth_stage"] = r.birth_stage;
    e["satisfied"] = r.status == RequirementStatus::kSatisfied;
    q.push_back(e);
  }
  j["queue"] = q;
  nlohmann::json tb = nlohmann::json::array();
  for (const Tombstone& t : state.tombstones) {
    nlohmann::json e;
    e["stage"] = t.stage;
    e["symbol"] = t.symbol;
    e["verts"] = t.verts;
    tb.push_back(e);
  }
  j["tombstones"] = tb;
  return j.dump();
}

}  // namespace amalg
