#include "amalg/mu.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "amalg/closure.hpp"
#include "amalg/extension.hpp"
#include "amalg/gadgets.hpp"
#include "json.hpp"

namespace amalg {

long long pair_code(long long i, long long j) {
  return (i + j) * (i + j + 1) / 2 + j;
}

MuSnapshot MuSnapshot::seeded(int n, const std::vector<int>& cols) {
  MuSnapshot s;
  s.n = n;
  for (int c : cols) s = s.advanced(c).advanced(c);
  return s;
}

MuSnapshot MuSnapshot::advanced(int column) const {
  if (column < 0) throw std::invalid_argument("advance: negative column");
  MuSnapshot out = *this;
  out.columns[column].push_back(pair_code(column, stage));
  out.stage = stage + 1;
  return out;
}

bool MuSnapshot::has_markers(int column) const {
  auto it = columns.find(column);
  return it != columns.end() && it->second.size() >= 2;
}

std::optional<long long> MuSnapshot::j0(int column) const {
  auto it = columns.find(column);
  if (it == columns.end() || it->second.size() < 2) return std::nullopt;
  return it->second[it->second.size() - 2];
}

std::optional<long long> MuSnapshot::j1(int column) const {
  auto it = columns.find(column);
  if (it == columns.end() || it->second.size() < 2) return std::nullopt;
  return it->second.back();
}

std::vector<long long> MuSnapshot::s0(int column) const {
  auto it = columns.find(column);
  if (it == columns.end() || it->second.size() <= 2) return {};
  return std::vector<long long>(it->second.begin(), it->second.end() - 2);
}

std::vector<long long> MuSnapshot::s0_all() const {
  std::vector<long long> out;
  for (const auto& [c, codes] : columns) {
    auto part = s0(c);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> MuSnapshot::column_indices() const {
  std::vector<int> out;
  for (const auto& [c, codes] : columns) out.push_back(c);
  return out;
}

namespace {

// Relative-type equality against the canonical omega template for `code`.
// Sizes differ across codes, so almost all candidates are rejected cheaply
// without building the template.
bool is_omega_extension(const ExtensionTemplate& t, long long code, int n) {
  if (static_cast<int>(t.base.size()) != n + 2) return false;
  long long want_ext = 2 * (static_cast<long long>(n) + 3 + code);
  if (static_cast<long long>(t.ext.size()) != want_ext) return false;
  if (static_cast<long long>(t.link_edges().size()) != want_ext) return false;
  ExtensionTemplate om = omega(code, n);
  return templates_isomorphic(t, om, /*strict_base=*/false);
}

}  // namespace

long long mu_eval(const MuSnapshot& snap, const FinStructure& s,
                  std::span<const Vertex> base, const ExtensionTemplate& t,
                  MaybeStage m) {
  if (base.size() != t.base.size())
    throw std::invalid_argument("mu_eval: base tuple length differs from template base");
  for (Vertex v : base)
    if (!s.has_vertex(v)) throw std::invalid_argument("mu_eval: base vertex not in structure");
  {
    // precondition: the template itself must be minimally simply algebraic
    std::vector<Vertex> tb = vset::sorted(t.base);
    std::vector<Vertex> te = vset::sorted(t.ext);
    auto w = msa_base(t.pattern, tb, te);
    if (!w || vset::sorted(w->base) != tb)
      throw std::invalid_argument("mu_eval: template is not minimally simply algebraic");
  }
  const long long asize = static_cast<long long>(base.size());
  std::vector<Vertex> base_set(base.begin(), base.end());
  std::sort(base_set.begin(), base_set.end());

  auto r_i_holds = [&](int column) {
    // symbol for R_i is column + 1; the fact must sit exactly on the base set
    if (static_cast<int>(base_set.size()) != s.arity(column + 1)) return false;
    return s.has_edge(column + 1, base_set);
  };

  for (int col : snap.column_indices()) {
    auto c0 = snap.j0(col);
    if (c0 && r_i_holds(col) && is_omega_extension(t, *c0, snap.n)) return asize + 4;
  }
  for (int col : snap.column_indices()) {
    auto c1 = snap.j1(col);
    if (!c1 || !r_i_holds(col)) continue;
    if (m.has_value() && *m < *c1) continue;
    if (is_omega_extension(t, *c1, snap.n)) return asize + 4;
  }
  for (long long code : snap.s0_all())
    if (is_omega_extension(t, code, snap.n)) return asize + 4;
  return asize + 3;
}

bool is_permissive(const MuSnapshot& snap, long long k) {
  (void)snap;
  return k <= 3;  // minimum reachable value is |A|+3 with an empty base
}

bool is_defunct(const FinStructure& s, const Edge& occurrence, const MuSnapshot& snap) {
  if (occurrence.symbol <= 0)
    throw std::invalid_argument("is_defunct: only auxiliary symbols can be defunct");
  if (!s.has_edge(occurrence)) throw std::invalid_argument("is_defunct: occurrence absent");
  int column = occurrence.symbol - 1;
  auto c1 = snap.j1(column);
  if (!c1) return false;
  return g_value_below(s, occurrence.verts, *c1).has_value();
}

bool limited_away_now(const MuSnapshot& snap, int i, long long window) {
  if (window <= 0) return true;
  auto it = snap.columns.find(i);
  if (it == snap.columns.end() || it->second.empty()) return true;
  // recover the stage at which the last code of column i was enumerated
  long long last_code = it->second.back();
  for (long long st = snap.stage - 1; st >= 0 && st >= snap.stage - window; --st)
    if (pair_code(i, st) == last_code) return false;
  return true;
}

using nlohmann::json;

std::string snapshot_to_json_string(const MuSnapshot& snap, bool pretty) {
  json j;
  j["n"] = snap.n;
  j["stage"] = snap.stage;
  json cols = json::object();
  for (const auto& [c, codes] : snap.columns) cols[std::to_string(c)] = codes;
  j["columns"] = std::move(cols);
  return pretty ? j.dump(2) : j.dump();
}

MuSnapshot snapshot_from_json_string(const std::string& text) {
  json j = json::parse(text);
  MuSnapshot s;
  s.n = j.at("n").get<int>();
  s.stage = j.at("stage").get<long long>();
  for (const auto& [k, v] : j.at("columns").items())
    s.columns[std::stoi(k)] = v.get<std::vector<long long>>();
  return s;
}

MuSnapshot snapshot_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return snapshot_from_json_string(ss.str());
}

}  // namespace amalg
