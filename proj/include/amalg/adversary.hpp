#ifndef AMALG_ADVERSARY_HPP
#define AMALG_ADVERSARY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amalg/mu.hpp"
#include "amalg/structure.hpp"

namespace amalg {

/**
 * A stage-presented partial atomic diagram: facts accumulate, edges only
 * reference previously introduced vertices.  File format: one fact per
 * line, `V <id>` / `E <symbol> <id...>`, with `STAGE` separator lines.
 */
struct CandidateStream {
  int index = 0;                      // strategy index i
  std::vector<Vertex> tuple;          // the tuple b-bar_i, length >= n+1
  std::vector<std::vector<std::string>> stages;  // raw fact lines per stage

  // Cumulative structure after the first `upto` stages.
  FinStructure prefix(int n_param, long long upto) const;
  long long stage_count() const { return static_cast<long long>(stages.size()); }
};

CandidateStream candidate_from_file(const std::string& path, int index,
                                    std::vector<Vertex> tuple);
CandidateStream candidate_from_string(const std::string& text, int index,
                                      std::vector<Vertex> tuple);

struct Obstruction {
  std::vector<Vertex> y;  // sorted vertex set with low delta
  bool removed = false;
};

struct StrategyState {
  int index = 0;
  int step = 0;                    // 0, 1, or 2 (2 is transient)
  std::vector<Vertex> chosen;      // first n+1 entries of the tuple
  std::optional<Vertex> witness;   // c with apparent R_i(chosen, c)
  std::vector<Obstruction> obstructions;  // frozen at step-1 entry
  std::vector<std::vector<Vertex>> late_obstructions;  // recorded, non-blocking
  std::vector<int> suspicious;     // symbol indices marked suspicious
  long long step1_entry_stage = -1;
  long long pass_count = 0;        // completed trips through step 2
  // per-column code counts at step-1 entry; a column that has grown since
  // marks its symbol suspicious
  std::map<int, std::size_t> entry_code_counts;
  bool seeds_requested = false;    // step-0 codes already asked for
};

struct EnumerationAction {
  int column = 0;
  std::string reason;
};

/**
 * One strategy step against the candidate prefix under the current
 * snapshot.  Step 0: request codes <i,0>, <i,1>; once they are live, scan
 * for a witness c with apparent R_i(chosen, c) and move to step 1, freezing
 * the obstruction ledger.  Step 1: extend the suspicious set with any
 * column advanced since entry, recompute the discounted delta of each
 * frozen obstruction over non-suspicious symbols, mark those reaching
 * |tuple| removed; when n+6 disjoint copies of both live omega forms exist
 * over (chosen, c) and all obstructions are removed, emit the step-2
 * enumeration <i, stage> and return to step 1.
 */
std::vector<EnumerationAction> strategy_step(StrategyState& st,
                                             const CandidateStream& candidate,
                                             const FinStructure& view,
                                             const MuSnapshot& snap,
                                             long long stage);

struct DuelTranscript {
  std::vector<std::string> lines;
  MuSnapshot final_snap;
  std::vector<StrategyState> strategies;
  long long stages_run = 0;
};

/**
 * Runs strategies 0..s-1 at each stage s against the candidate, merging
 * enumeration actions through a one-code-per-stage queue drained in
 * strategy-index order.
 */
DuelTranscript run_duel(const std::vector<CandidateStream>& candidates, int n_param,
                        long long stage_budget);

/**
 * Synthesizes a candidate stream that feeds a strategy exactly what it asks
 * for: a witness edge, then enough omega copies for each live code pair, on
 * a schedule that lets the strategy pass through step 2 at least
 * `target_passes` times within the budget.  Used by integration tests.
 */
CandidateStream make_cooperative_candidate(int n_param, std::vector<Vertex> tuple,
                                           int target_passes, long long stage_budget);

}  // namespace amalg

#endif  // AMALG_ADVERSARY_HPP
