#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ple/lambda_inst.hpp"
#include "ple/smt.hpp"
#include "ple/terms.hpp"

namespace ple::engine {

struct EngineConfig {
  int max_iters = 10'000;
  int64_t max_instances = 1'000'000;
  SmtConfig smt{};
  SolverBackend backend = SolverBackend::builtin();
  lambda_inst::LambdaConfig lambdas{};
};

// One admitted branch equality (f(x̄) = b_i)[x̄ := ē].
struct Instance {
  std::string fname;
  std::vector<Term> args;
  int branch = 0;
  Term equality;
  Term guard;         // substituted guard whose validity admitted it
  int iteration = 0;  // unfold round: 0 = goal seeding, k = k-th loop round
};

enum class PleStatus { Proved, UnprovedFixpoint, Aborted };

struct PleOutcome {
  PleStatus status = PleStatus::Aborted;
  // Goal validity checks performed; Proved on check 1 means the seeded
  // environment already sufficed.
  int iterations = 0;
  int64_t instance_count = 0;
  std::string abort_reason;  // iteration-cap | instance-cap | unknown:<why>
  std::vector<Instance> instances;  // discovery order
  std::vector<size_t> phi_sizes;    // |Φ_i| at each goal check
  // Hypothesis snapshot per unfold round; instances[k].guard was proved
  // valid against phi_snapshots[instances[k].iteration].
  std::vector<std::vector<Term>> phi_snapshots;
  LogicalEnv final_phi;
  Term goal;
};

// Branch equalities of f(args) whose substituted guards are valid under
// phi (Unknown counts as not valid).
std::vector<Instance> instantiate(
    const DefEnv& defs, const LogicalEnv& phi, const std::string& fname,
    const std::vector<Term>& args, const SmtConfig& cfg = {},
    const SolverBackend& backend = SolverBackend::builtin());

// Φ ∪ all instance equalities over the applications occurring in Φ; guards
// are checked against the Φ argument itself.
LogicalEnv unfold(const DefEnv& defs, const LogicalEnv& phi,
                  const SmtConfig& cfg = {},
                  const SolverBackend& backend = SolverBackend::builtin(),
                  std::vector<Instance>* out_instances = nullptr);

// depth-0 = Φ; depth-(n+1) = B_n ∪ unfold(Λ, B_n). Monotone in depth.
LogicalEnv bounded_unfold(const DefEnv& defs, const LogicalEnv& phi, int depth,
                          const SmtConfig& cfg = {},
                          const SolverBackend& backend = SolverBackend::builtin());

// Fixpoint proof search: seed Φ_0 with instances over the goal's
// applications, then alternate goal checks with unfolding until proved,
// stabilized, or capped. Lambda equality instances join the hypothesis
// set whenever new lambda terms enter it.
PleOutcome ple_query(const DefEnv& defs, const std::vector<Term>& hyps,
                     const Term& goal, const EngineConfig& cfg = {});

// One unfolding step from the head of an instance to a defined application
// inside its instantiated body.
struct LogicalStep {
  Term from;
  Term to;
  int instance = 0;  // index into PleOutcome::instances
};

struct LogicalTrace {
  std::vector<LogicalStep> steps;
};

LogicalTrace extract_trace(const DefEnv& defs, const PleOutcome& out);

// Versioned JSON report of an outcome plus its trace; parses back with any
// JSON parser, schema documented in the README.
std::string trace_json(const DefEnv& defs, const PleOutcome& out);

}  // namespace ple::engine
