#pragma once

#include <string>
#include <vector>

#include "ple/engine.hpp"
#include "ple/reflect.hpp"
#include "ple/terms.hpp"

namespace ple::eqproof {

struct StepVerdict {
  int index = 0;
  size_t phi_size = 0;  // |Φ'| the link was checked under
  bool passed = false;
  bool assumed = false;  // extensionality link, admitted without a check
  std::string vc;        // the failing VC, pretty-printed (empty on pass)
};

struct ProofReport {
  bool passed = false;
  surface::Rel composed = surface::Rel::Eq;  // relation the chain certifies
  std::vector<StepVerdict> steps;
  std::string error;  // composition or endpoint failure (empty otherwise)
};

// Checks a proof script against its goal: every link v ⋈ e' must be valid
// under one unfolding of Φ ∪ justifications ∪ {v = e''} where e'' is the
// current chain endpoint and v is the reserved variable %chain; the chain's
// composed relation must certify the goal's relation over its endpoints
// (forward or reversed).
ProofReport check_proof(const DefEnv& defs, const reflect::EmbeddedGoal& goal,
                        const reflect::EmbeddedProof& proof,
                        const engine::EngineConfig& cfg = {});

// The completeness side: run the fixpoint engine on the same goal.
engine::PleOutcome proof_to_ple_check(const DefEnv& defs,
                                      const reflect::EmbeddedGoal& goal,
                                      const engine::EngineConfig& cfg = {});

// Relation algebra used by the checker (exposed for tests): transitive
// composition (throws InputError when the pair does not compose) and
// certification (does established `have` imply claimed `want`?).
surface::Rel compose_rel(surface::Rel a, surface::Rel b);
bool rel_certifies(surface::Rel have, surface::Rel want);
surface::Rel reverse_rel(surface::Rel r);

}  // namespace ple::eqproof
