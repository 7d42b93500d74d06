#include "amalg/adversary.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amalg/closure.hpp"
#include "amalg/extension.hpp"
#include "amalg/gadgets.hpp"

namespace amalg {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::string set_str(std::span<const Vertex> t) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << "}";
  return os.str();
}

}  // namespace

FinStructure CandidateStream::prefix(int n_param, long long upto) const {
  FinStructure s(n_param);
  const long long last = std::min<long long>(upto, stage_count());
  for (long long st = 0; st < last; ++st) {
    for (const std::string& line : stages[st]) {
      if (line.empty()) continue;
      std::istringstream is(line);
      std::string tag;
      is >> tag;
      if (tag == "V") {
        Vertex v;
        if (!(is >> v)) throw std::invalid_argument("candidate: bad V line: " + line);
        if (!s.has_vertex(v)) s.add_vertex(v);
      } else if (tag == "E") {
        int symbol;
        if (!(is >> symbol)) throw std::invalid_argument("candidate: bad E line: " + line);
        std::vector<Vertex> verts;
        Vertex v;
        while (is >> v) verts.push_back(v);
        for (Vertex w : verts)
          if (!s.has_vertex(w))
            throw std::invalid_argument("candidate: edge references unknown vertex: " + line);
        verts = vset::sorted(std::move(verts));
        if (!s.has_edge(symbol, verts)) s.add_edge(symbol, std::move(verts));
      } else {
        throw std::invalid_argument("candidate: unknown fact line: " + line);
      }
    }
  }
  return s;
}

CandidateStream candidate_from_string(const std::string& text, int index,
                                      std::vector<Vertex> tuple) {
  CandidateStream c;
  c.index = index;
  c.tuple = std::move(tuple);
  c.stages.emplace_back();
  for (const std::string& line : split_lines(text)) {
    if (line.empty()) continue;
    if (line == "STAGE") {
      c.stages.emplace_back();
    } else {
      c.stages.back().push_back(line);
    }
  }
  return c;
}

CandidateStream candidate_from_file(const std::string& path, int index,
                                    std::vector<Vertex> tuple) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("candidate: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return candidate_from_string(buf.str(), index, std::move(tuple));
}

namespace {

// Exact count (capped at `need`) of pairwise-disjoint copies of the template
// over the ordered base tuple, counting bare link-pattern matches.
long long omega_count(const FinStructure& view, std::span<const Vertex> base,
                      const ExtensionTemplate& t, long long need) {
  for (Vertex v : base)
    if (!view.has_vertex(v)) return 0;
  MatchOptions opts;
  opts.check_base_type = false;
  FamilyCount fc = max_disjoint_family(view, base, t, opts);
  return std::min(fc.count, need);
}

// Frozen obstruction scan: every Y with tuple <= Y and delta(Y) < |tuple|.
// Isolated vertices only raise delta, so the enumeration runs over the
// vertices that carry edges; beyond the exhaustive cap we fall back to the
// single canonical minimal witness from the flow reduction.
std::vector<Obstruction> scan_obstructions(const FinStructure& view,
                                           const std::vector<Vertex>& tuple) {
  std::vector<Obstruction> out;
  for (Vertex v : tuple)
    if (!view.has_vertex(v)) return out;
  const long long bar = static_cast<long long>(tuple.size());
  if (min_delta_over_supersets(view, tuple) >= bar) return out;
  std::vector<Vertex> pool;
  for (Vertex v : view.vertices())
    if (!vset::contains(tuple, v) && !view.edges_at(v).empty()) pool.push_back(v);
  if (pool.size() <= 16) {
    for (std::uint64_t mask = 0; mask < (1ull << pool.size()); ++mask) {
      std::vector<Vertex> y = tuple;
      for (size_t j = 0; j < pool.size(); ++j)
        if (mask & (1ull << j)) y.push_back(pool[j]);
      y = vset::sorted(std::move(y));
      if (view.delta(y) < bar) out.push_back(Obstruction{std::move(y), false});
    }
  } else {
    out.push_back(Obstruction{min_delta_witness(view, tuple), false});
  }
  std::sort(out.begin(), out.end(),
            [](const Obstruction& a, const Obstruction& b) { return a.y < b.y; });
  return out;
}

long long discounted_delta(const FinStructure& view, const std::vector<Vertex>& y,
                           const std::vector<int>& suspicious) {
  long long edges = 0;
  for (const Edge& e : view.edges()) {
    if (e.symbol > 0 &&
        std::find(suspicious.begin(), suspicious.end(), e.symbol - 1) != suspicious.end())
      continue;
    if (vset::is_subset(e.verts, y)) ++edges;
  }
  long long present = 0;
  for (Vertex v : y)
    if (view.has_vertex(v)) ++present;
  return present - edges;
}

}  // namespace

std::vector<EnumerationAction> strategy_step(StrategyState& st,
                                             const CandidateStream& candidate,
                                             const FinStructure& view,
                                             const MuSnapshot& snap, long long stage) {
  std::vector<EnumerationAction> actions;
  const int n = snap.n;
  const long long need = n + 6;
  if (st.chosen.empty()) {
    if (static_cast<int>(candidate.tuple.size()) < n + 1)
      throw std::invalid_argument("strategy: tuple shorter than n+1");
    st.index = candidate.index;
    st.chosen.assign(candidate.tuple.begin(), candidate.tuple.begin() + n + 1);
  }

  if (st.step == 0) {
    if (!st.seeds_requested) {
      actions.push_back({st.index, "seed-0"});
      actions.push_back({st.index, "seed-1"});
      st.seeds_requested = true;
    }
    if (!snap.has_markers(st.index)) return actions;
    // scan for a witness c with apparent R_index(chosen, c)
    for (Vertex c : view.vertices()) {
      if (vset::contains(st.chosen, c)) continue;
      std::vector<Vertex> base = st.chosen;
      base.push_back(c);
      bool apparent = false;
      for (long long code : {*snap.j0(st.index), *snap.j1(st.index)})
        if (omega_count(view, base, omega(code, n), need) >= need) {
          apparent = true;
          break;
        }
      if (!apparent) continue;
      st.witness = c;
      st.step = 1;
      st.step1_entry_stage = stage;
      for (int col : snap.column_indices())
        st.entry_code_counts[col] = snap.columns.at(col).size();
      st.obstructions = scan_obstructions(view, candidate.tuple);
      break;
    }
    return actions;
  }

  // step 1
  for (int col : snap.column_indices()) {
    auto it = st.entry_code_counts.find(col);
    const std::size_t baseline = it == st.entry_code_counts.end() ? 0 : it->second;
    if (snap.columns.at(col).size() > baseline &&
        !vset::contains(st.suspicious, col)) {
      st.suspicious.push_back(col);
      std::sort(st.suspicious.begin(), st.suspicious.end());
    }
  }
  for (Obstruction& ob : st.obstructions) {
    if (ob.removed) continue;  // removal is sticky
    if (discounted_delta(view, ob.y, st.suspicious) >=
        static_cast<long long>(candidate.tuple.size()))
      ob.removed = true;
  }
  // late obstructions: recorded, never blocking
  for (const Obstruction& late : scan_obstructions(view, candidate.tuple)) {
    bool frozen = false;
    for (const Obstruction& ob : st.obstructions) frozen = frozen || ob.y == late.y;
    bool known = false;
    for (const auto& y : st.late_obstructions) known = known || y == late.y;
    if (!frozen && !known) st.late_obstructions.push_back(late.y);
  }

  bool blocked = false;
  for (const Obstruction& ob : st.obstructions) blocked = blocked || !ob.removed;
  if (blocked || !st.witness) return actions;
  std::vector<Vertex> base = st.chosen;
  base.push_back(*st.witness);
  const bool ready =
      omega_count(view, base, omega(*snap.j0(st.index), n), need) >= need &&
      omega_count(view, base, omega(*snap.j1(st.index), n), need) >= need;
  if (ready) actions.push_back({st.index, "step2"});
  return actions;
}

DuelTranscript run_duel(const std::vector<CandidateStream>& candidates, int n_param,
                        long long stage_budget) {
  DuelTranscript tr;
  tr.final_snap.n = n_param;
  tr.strategies.resize(candidates.size());
  struct Pending {
    int strategy;
    EnumerationAction action;
  };
  std::deque<Pending> queue;
  auto queued = [&](int strategy, const std::string& reason) {
    for (const Pending& p : queue)
      if (p.strategy == strategy && p.action.reason == reason) return true;
    return false;
  };
  for (long long stage = 0; stage < stage_budget; ++stage) {
    tr.lines.push_back("STAGE " + std::to_string(stage));
    const size_t active = std::min<size_t>(candidates.size(), static_cast<size_t>(stage) + 1);
    for (size_t i = 0; i < active; ++i) {
      StrategyState& st = tr.strategies[i];
      const int prev_step = st.step;
      FinStructure view = candidates[i].prefix(n_param, stage + 1);
      std::vector<EnumerationAction> acts =
          strategy_step(st, candidates[i], view, tr.final_snap, stage);
      if (prev_step == 0 && st.step == 1)
        tr.lines.push_back("S" + std::to_string(i) + " STEP1 witness " +
                           std::to_string(*st.witness) + " obstructions " +
                           std::to_string(st.obstructions.size()));
      for (const std::vector<Vertex>& y : st.late_obstructions) {
        std::string line = "LATE S" + std::to_string(i) + " Y=" + set_str(y);
        if (std::find(tr.lines.begin(), tr.lines.end(), line) == tr.lines.end())
          tr.lines.push_back(line);
      }
      for (const EnumerationAction& a : acts)
        if (!queued(static_cast<int>(i), a.reason))
          queue.push_back(Pending{static_cast<int>(i), a});
    }
    if (!queue.empty()) {
      std::stable_sort(queue.begin(), queue.end(),
                       [](const Pending& a, const Pending& b) {
                         return a.strategy < b.strategy;
                       });
      Pending p = queue.front();
      queue.pop_front();
      tr.final_snap = tr.final_snap.advanced(p.action.column);
      tr.lines.push_back("ENUM column " + std::to_string(p.action.column) + " code " +
                         std::to_string(tr.final_snap.columns.at(p.action.column).back()) +
                         " (S" + std::to_string(p.strategy) + " " + p.action.reason + ")");
      if (p.action.reason == "step2") {
        ++tr.strategies[p.strategy].pass_count;
        tr.lines.push_back("PASS S" + std::to_string(p.strategy) + " count " +
                           std::to_string(tr.strategies[p.strategy].pass_count));
      }
    }
    ++tr.stages_run;
  }
  return tr;
}

CandidateStream make_cooperative_candidate(int n_param, std::vector<Vertex> tuple,
                                           int target_passes, long long stage_budget) {
  if (static_cast<int>(tuple.size()) < n_param + 1)
    throw std::invalid_argument("cooperative candidate: tuple shorter than n+1");
  CandidateStream cand;
  cand.index = 0;
  cand.tuple = tuple;

  // Co-simulate the single-strategy duel, appending at each stage exactly the
  // facts the strategy is waiting for; the real duel then replays this
  // trajectory (the strategy is deterministic in view + snapshot).
  FinStructure built(n_param);
  Vertex fresh = *std::max_element(tuple.begin(), tuple.end()) + 1;
  const Vertex witness = fresh++;
  std::vector<Vertex> chosen(tuple.begin(), tuple.begin() + n_param + 1);
  std::vector<Vertex> base = chosen;
  base.push_back(witness);

  MuSnapshot snap;
  snap.n = n_param;
  StrategyState st;
  std::deque<EnumerationAction> queue;
  long long passes = 0;

  auto add_vertex = [&](std::vector<std::string>& stage_lines, Vertex v) {
    if (built.has_vertex(v)) return;
    built.add_vertex(v);
    stage_lines.push_back("V " + std::to_string(v));
  };
  auto add_omega_copies = [&](std::vector<std::string>& stage_lines, long long code) {
    ExtensionTemplate om = omega(code, n_param);
    MatchOptions opts;
    opts.check_base_type = false;
    const long long need = n_param + 6;
    long long have = built.empty() ? 0 : max_disjoint_family(built, base, om, opts).count;
    for (long long c = have; c < need; ++c) {
      std::map<Vertex, Vertex> rl;
      for (size_t j = 0; j < om.base.size(); ++j) rl[om.base[j]] = base[j];
      for (Vertex v : om.ext) {
        rl[v] = fresh;
        add_vertex(stage_lines, fresh);
        ++fresh;
      }
      for (const Edge& e : om.link_edges()) {
        std::vector<Vertex> img;
        for (Vertex v : e.verts) img.push_back(rl.at(v));
        img = vset::sorted(std::move(img));
        if (built.has_edge(e.symbol, img)) continue;
        std::string line = "E " + std::to_string(e.symbol);
        for (Vertex v : img) line += " " + std::to_string(v);
        built.add_edge(e.symbol, img);
        stage_lines.push_back(line);
      }
    }
  };

  for (long long stage = 0; stage < stage_budget && passes < target_passes; ++stage) {
    std::vector<std::string> stage_lines;
    if (stage == 0) {
      for (Vertex v : tuple) add_vertex(stage_lines, v);
      add_vertex(stage_lines, witness);
    }
    if (snap.has_markers(0)) {
      add_omega_copies(stage_lines, *snap.j0(0));
      add_omega_copies(stage_lines, *snap.j1(0));
    }
    cand.stages.push_back(stage_lines);

    std::vector<EnumerationAction> acts = strategy_step(st, cand, built, snap, stage);
    for (const EnumerationAction& a : acts) {
      bool dup = false;
      for (const EnumerationAction& q : queue) dup = dup || q.reason == a.reason;
      if (!dup) queue.push_back(a);
    }
    if (!queue.empty()) {
      EnumerationAction a = queue.front();
      queue.pop_front();
      snap = snap.advanced(a.column);
      if (a.reason == "step2") ++passes;
    }
  }
  if (passes < target_passes)
    throw std::runtime_error("cooperative candidate: budget too small for " +
                             std::to_string(target_passes) + " passes");
  return cand;
}

}  // namespace amalg
