#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ple/terms.hpp"

namespace ple {

enum class SmtVerdict { Valid, Invalid, Unknown };

// Ground countermodel: variable name -> value term (IntLit / BoolLit /
// ground ConApp). Unconstrained data/function values appear as distinct
// tokens (Var "%tokN") that callers may concretize per datatype.
struct SmtModel {
  std::unordered_map<std::string, Term> values;
};

struct SmtResult {
  SmtVerdict verdict;
  std::optional<SmtModel> model;  // Invalid only (may be absent for external)
  std::string unknown_reason;     // Unknown only
  bool is_valid() const { return verdict == SmtVerdict::Valid; }
};

struct SatStatus {
  enum Kind { Sat, Unsat, Unknown } kind;
  std::optional<SmtModel> model;
  std::string reason;
};

struct SmtConfig {
  // Abstract step budget: decisions, theory checks, probes, B&B nodes.
  int64_t budget = 4'000'000;
  int bb_depth = 24;
  int bb_nodes = 512;
  int probe_pairs = 512;
};

// Satisfiability of a conjunction of quantifier-free assertions.
SatStatus check_sat(const DefEnv& env, const std::vector<Term>& assertions,
                    const SmtConfig& cfg = {});

// Validity of hyps |- goal, decided as unsatisfiability of hyps + {not goal}.
SmtResult is_valid(const DefEnv& env, const LogicalEnv& hyps, const Term& goal,
                   const SmtConfig& cfg = {});

// Ground congruence closure: do eqs entail lhs = rhs? (EUF + ADT rules only.)
bool cc_decide(const DefEnv& env,
               const std::vector<std::pair<Term, Term>>& eqs, const Term& lhs,
               const Term& rhs);

// ---- SMT-LIB2 text backend ----------------------------------------------

// Deterministic SMT-LIB2 v2.6 script for hyps |- goal (asserts the negation
// and checks satisfiability; unsat means Valid). Byte-stable for identical
// inputs.
std::string emit_smtlib(const DefEnv& env, const std::vector<Term>& hyps,
                        const Term& goal);

// Runs the script through `command` (split on whitespace, argv-style) over
// stdin/stdout. unsat -> Valid, sat -> Invalid (no model), unknown ->
// Unknown. Spawn/IO failures and unparseable answers raise SolverError.
SmtResult external_is_valid(const DefEnv& env, const std::vector<Term>& hyps,
                            const Term& goal, const std::string& command);

// Reads one SMT-LIB2 script (as emitted by emit_smtlib) from `in`, decides
// it with the built-in solver, writes sat/unsat/unknown to `out`. Used by
// `plec smt-server`; returns a process exit code.
int smt_server_run(std::istream& in, std::ostream& out);

// ---- Backend selection and incremental assertion stack -------------------

struct SolverBackend {
  enum Kind { Builtin, External } kind = Builtin;
  std::string command;  // External only
  static SolverBackend builtin() { return {}; }
  static SolverBackend external(std::string cmd) {
    SolverBackend b;
    b.kind = External;
    b.command = std::move(cmd);
    return b;
  }
};

// Assertion-stack frontend shared by the engine's guard checks (one solver
// per iteration, push/pop framing) and goal checks.
class Solver {
 public:
  Solver(const DefEnv& env, SmtConfig cfg = {},
         SolverBackend backend = SolverBackend::builtin());

  void push();
  void pop();
  void assert_term(const Term& t);
  void assert_all(const LogicalEnv& env);

  SmtResult check_valid(const Term& goal);

  int64_t checks() const { return checks_; }
  int64_t unknowns() const { return unknowns_; }

 private:
  const DefEnv& env_;
  SmtConfig cfg_;
  SolverBackend backend_;
  std::vector<Term> stack_;
  std::vector<size_t> frames_;
  int64_t checks_ = 0;
  int64_t unknowns_ = 0;
};

// Test hook: observes every validity query issued through Solver /
// is_valid-with-backend paths (used by the backend-agreement suites).
using VcListener = std::function<void(const std::vector<Term>&, const Term&)>;
void set_vc_listener(VcListener l);

}  // namespace ple
