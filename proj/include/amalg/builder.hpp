#ifndef AMALG_BUILDER_HPP
#define AMALG_BUILDER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amalg/extension.hpp"
#include "amalg/mu.hpp"
#include "amalg/structure.hpp"

namespace amalg {

enum class RequirementStatus { kPending, kSatisfied };

/**
 * A scheduled amalgamation obligation: realize the template's extension
 * strongly over the named base tuple of N.  The template may bundle several
 * copies of one form (the whole bundle is joined in a single strong
 * amalgamation, which decomposes it into minimal steps internally).
 */
struct Requirement {
  std::vector<Vertex> base;  // ordered tuple in N, strong at scheduling time
  ExtensionTemplate tmpl;
  long long birth_stage = 0;
  RequirementStatus status = RequirementStatus::kPending;
  std::string label;  // stable generator tag, for logs
};

struct Tombstone {
  int symbol = 0;
  std::vector<Vertex> verts;  // sorted edge occurrence removed
  long long stage = 0;
};

struct StageEvent {
  long long stage = 0;
  std::string kind;  // STAGE / ENUM / CLEANUP / AMALGAM / REUSE / LATE
  std::string detail;
};

struct BuilderConfig {
  int n = 1;
  std::uint64_t seed = 0;
  long long stages = 0;
  // column advanced at each stage; stage s uses script[s] when present,
  // otherwise a fresh column (max live column + 1).
  std::vector<int> script;
  // requirement generation caps
  int max_new_requirements_per_stage = 4;
  // audit levels: 0 = invariant-critical only, 1 = + per-stage class audit,
  // 2 = + exhaustive small-structure checks
  int audit_level = 1;
  long long audit_work_budget = 50'000'000;
  int exhaustive_delta_check_limit = 16;  // |N| cap for all-X delta audits
  std::string out_dir;                    // empty: no run directory
};

struct StageState {
  FinStructure n;  // the structure under construction
  MuSnapshot snap;
  long long stage = 0;
  std::vector<Requirement> queue;
  std::vector<Tombstone> tombstones;
  std::vector<StageEvent> log;
  BuilderConfig config;
  long long generator_cursor = 0;  // position in the canonical generator stream
};

/** Fresh state at stage 0: empty structure, seeded snapshot. */
StageState make_initial_state(const BuilderConfig& config);

/**
 * Appends newly legal requirements for the current stage.  Ordering
 * discipline: previously queued requirements keep their relative order;
 * new ones are appended after them, drawn from a canonical generator
 * stream filtered by stage-tied size caps and current class membership.
 */
void schedule(StageState& state);

/**
 * Clean-up for the column advanced this stage: if some occurrence of the
 * column's relation was defunct at the pre-advance snapshot, remove the
 * least such occurrence (order: max vertex-id, then lexicographic), then
 * restore every old tuple's delta with dimension-dropping gadget
 * attachments.  Records a tombstone.  No-op when nothing is defunct.
 */
void cleanup(StageState& state, const MuSnapshot& before, int advanced_column);

/**
 * One full stage: advance the snapshot (per script), run cleanup, schedule,
 * then satisfy the first `stage` pending requirements by strong
 * amalgamation.  Audits per config.audit_level; throws with a certificate
 * message on any invariant violation.
 */
void run_stage(StageState& state);

/** Runs config.stages stages from a fresh state; writes run dir if set. */
StageState run_build(const BuilderConfig& config);

struct HatVerdict {
  int column = 0;
  std::vector<Vertex> tuple;  // sorted (n+2)-set
  bool relation_present = false;
  int family_count = 0;  // disjoint omega_{<i,j0>} copies found (capped at n+6)
  bool defined = false;  // family_count >= n+6
};

/**
 * Finite-stage approximation of the definitional expansion: for every live
 * column i and every (n+2)-set currently carrying R_i, plus every base of a
 * counted omega family, report whether n+6 disjoint omega_{<i,j0(i)>}
 * copies exist over it.
 */
std::vector<HatVerdict> hat_expansion(const StageState& state);

/**
 * Vertices x admitting a witness Y with basis in Y, x in Y,
 * delta(Y / basis) = 0, searched over witnesses of size at most
 * size_budget (monotone in the budget).  Precondition: basis independent
 * (dim = |basis|).
 */
std::vector<Vertex> extract_submodel(const StageState& state,
                                     std::span<const Vertex> basis, int size_budget);

/** Serialization of a stage (structure + snapshot + queue digest). */
std::string stage_to_json_string(const StageState& state);

}  // namespace amalg

#endif  // AMALG_BUILDER_HPP
