#ifndef AMALG_MU_HPP
#define AMALG_MU_HPP

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "amalg/structure.hpp"

namespace amalg {

/** Cantor pairing of (i, j); strictly monotone in each argument. */
long long pair_code(long long i, long long j);

/**
 * Stagewise enumeration bookkeeping for the bound family mu.  Each column i
 * holds the codes enumerated for auxiliary symbol R_i, in order.  Per
 * column, the last two codes are the live markers j0 (second-to-last) and
 * j1 (last); everything earlier has been retired into S0.
 */
struct MuSnapshot {
  int n = 1;
  long long stage = 0;  // stage number used for the next enumerated code
  std::map<int, std::vector<long long>> columns;

  /** Fresh snapshot with each listed column advanced twice (so its markers
   *  are live), matching the standing assumption that consulted columns are
   *  seeded with two initial codes. */
  static MuSnapshot seeded(int n, const std::vector<int>& cols);

  /** Appends pair_code(column, stage) to the column and bumps the stage. */
  MuSnapshot advanced(int column) const;

  bool has_markers(int column) const;                 // >= 2 codes
  std::optional<long long> j0(int column) const;      // second-to-last code
  std::optional<long long> j1(int column) const;      // last code
  std::vector<long long> s0(int column) const;        // retired codes
  std::vector<long long> s0_all() const;              // retired codes, all columns
  std::vector<int> column_indices() const;
};

/** Optional stage bound used where the paper writes m = infinity. */
using MaybeStage = std::optional<long long>;
inline constexpr std::nullopt_t kInfiniteStage = std::nullopt;

/**
 * mu(A, B, m) for the extension template T read over `base` inside s.
 * Returns |A|+4 exactly when T's relative type is the live-marker omega
 * template of some column whose symbol holds on the base (second marker
 * additionally requires m >= that code), or matches a retired code's omega
 * template; otherwise |A|+3.  T must be minimally simply algebraic
 * (std::invalid_argument otherwise).
 */
long long mu_eval(const MuSnapshot& snap, const FinStructure& s,
                  std::span<const Vertex> base, const ExtensionTemplate& t,
                  MaybeStage m);

/** Every reachable mu value is >= k; with this schedule, exactly k <= 3. */
bool is_permissive(const MuSnapshot& snap, long long k);

/**
 * A stored fact R_i(a) is defunct when g_s(a) < the column's last code.
 * False when the column has fewer than two codes.  Throws for symbol 0.
 */
bool is_defunct(const FinStructure& s, const Edge& occurrence, const MuSnapshot& snap);

/**
 * Finite-run proxy for a column being limited away: no code has entered
 * column i within the last `window` stages (window = 0: trivially true).
 */
bool limited_away_now(const MuSnapshot& snap, int i, long long window);

std::string snapshot_to_json_string(const MuSnapshot& snap, bool pretty = false);
MuSnapshot snapshot_from_json_string(const std::string& text);
MuSnapshot snapshot_from_json_file(const std::string& path);

}  // namespace amalg

#endif  // AMALG_MU_HPP
