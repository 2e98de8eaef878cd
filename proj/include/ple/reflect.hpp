#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ple/surface.hpp"
#include "ple/terms.hpp"

// Translation from the elaborated surface language into the logic: datatype
// theory declarations (checkers/selectors), case-to-ite embedding,
// defunctionalized lambdas and applications, and guard-normal-form
// extraction for reflected definitions.

namespace ple::reflect {

// Embedding scope: surface variable names to logic terms. Parameters and
// goal-level free variables map to Vars; case binders map to selector
// applications; lambda binders map to pool variables.
using Scope = std::unordered_map<std::string, Term>;

// A goal- or script-level free variable with its core sort; datatype names
// the declared type when the sort collapsed to Univ (for value sampling).
struct FreeVar {
  std::string name;
  Sort sort;
  std::string datatype;
};

struct EmbeddedStep {
  surface::Rel rel{};
  bool ext = false;  // extensionality step, discharged as assumed
  Term rhs;
  std::vector<Term> justs;  // Bool terms scoped to this step
};

struct EmbeddedProof {
  std::string name;
  std::string goal;  // referenced goal name
  Term start;
  std::vector<EmbeddedStep> steps;
  std::vector<FreeVar> frees;  // includes the goal's free variables
};

struct EmbeddedGoal {
  std::string name;
  surface::GoalMode mode{};
  std::vector<Term> hyps;
  surface::Rel rel{};
  Term lhs, rhs;
  // Free variables with core sorts, name-sorted (mirrors the surface goal).
  std::vector<FreeVar> frees;
};

// A reflected program: definitional environment plus embedded goals and
// proof scripts, with any completion warnings accumulated along the way.
struct Module {
  DefEnv env;
  std::vector<EmbeddedGoal> goals;
  std::vector<EmbeddedProof> proofs;
  std::vector<std::string> warnings;
};

// Registers the datatype with derived is_<Con> checkers and sel_<Con>_<i>
// selectors (1-based); the solver's ADT theory interprets them.
void declare_datatype(DefEnv& env, const surface::DataDecl& d);

// Embeds one elaborated expression. Case expressions become nested Ite over
// checkers, with pattern binders replaced by selector applications, nested
// left-to-right in constructor declaration order. Lambdas become ULam with
// a fresh pool binder (strictly above every lambda index in the body);
// first-order applications of reflected symbols become FunApp; every other
// application becomes UApp. A case that covers neither all constructors nor
// a wildcard (possible only for inputs built directly against this API) is
// completed with the uninterpreted constant undef_<owner> and a warning.
Term embed_expr(const DefEnv& env, const surface::ExprPtr& e,
                const Scope& scope,
                std::vector<std::string>* warnings = nullptr,
                const std::string& owner = "expr");

// Lifts every if-then-else into top-level guards: a branch's guard is the
// conjunction of the (possibly negated) conditions along its path, so the
// guards are mutually exclusive and exhaustive by construction. Adjacent
// branches with structurally equal bodies merge by disjoining their guards.
// Guards and bodies come out Ite-free. An Ite under a ULam is an error:
// such lambdas must be hoisted into named reflected definitions first.
std::vector<Branch> def_if(const Term& body);

// embed_expr + def_if, then rejects any lambda remaining in a guard or
// branch body; the result is registered in env and returned.
GuardedDef reflect_function(DefEnv& env, const surface::ReflectDef& def,
                            std::vector<std::string>* warnings = nullptr);

// lhs rel rhs as a Bool term.
Term rel_term(surface::Rel r, const Term& lhs, const Term& rhs);

// Whole-program translation: datatypes, then definitions in order, then
// goals, then proof scripts.
Module reflect_program(const surface::Program& p);

}  // namespace ple::reflect
