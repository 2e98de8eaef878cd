#include "ple/eqproof.hpp"

#include <string>

#include "ple/errors.hpp"
#include "ple/lambda_inst.hpp"

namespace ple::eqproof {

using surface::Rel;

surface::Rel compose_rel(Rel a, Rel b) {
  if (a == Rel::Eq) return b;
  if (b == Rel::Eq) return a;
  auto less = [](Rel r) { return r == Rel::Le || r == Rel::Lt; };
  auto greater = [](Rel r) { return r == Rel::Ge || r == Rel::Gt; };
  if (less(a) && less(b))
    return (a == Rel::Lt || b == Rel::Lt) ? Rel::Lt : Rel::Le;
  if (greater(a) && greater(b))
    return (a == Rel::Gt || b == Rel::Gt) ? Rel::Gt : Rel::Ge;
  throw InputError(std::string("proof steps '") + surface::rel_text(a) +
                   "' and '" + surface::rel_text(b) +
                   "' do not compose transitively");
}

bool rel_certifies(Rel have, Rel want) {
  if (have == want) return true;
  switch (have) {
    case Rel::Eq:
      return want == Rel::Le || want == Rel::Ge;
    case Rel::Lt:
      return want == Rel::Le || want == Rel::Ne;
    case Rel::Gt:
      return want == Rel::Ge || want == Rel::Ne;
    default:
      return false;
  }
}

surface::Rel reverse_rel(Rel r) {
  switch (r) {
    case Rel::Le:
      return Rel::Ge;
    case Rel::Lt:
      return Rel::Gt;
    case Rel::Ge:
      return Rel::Le;
    case Rel::Gt:
      return Rel::Lt;
    default:
      return r;  // Eq, Ne are symmetric
  }
}

namespace {

std::string vc_text(const LogicalEnv& phi, const Term& goal) {
  std::string s;
  for (const Term& h : phi) s += "  " + h.str() + "\n";
  s += "  |- " + goal.str();
  return s;
}

}  // namespace

ProofReport check_proof(const DefEnv& defs, const reflect::EmbeddedGoal& goal,
                        const reflect::EmbeddedProof& proof,
                        const engine::EngineConfig& cfg) {
  ProofReport rep;
  if (proof.steps.empty()) {
    rep.error = "proof script has no steps";
    return rep;
  }

  Term v = mk_var("%chain", proof.start.sort());
  Term cur = proof.start;
  bool all_steps_ok = true;
  bool use_lams = cfg.lambdas.enable_alpha || cfg.lambdas.enable_beta;

  for (size_t k = 0; k < proof.steps.size(); k++) {
    const reflect::EmbeddedStep& step = proof.steps[k];
    StepVerdict verdict;
    verdict.index = (int)k;

    if (step.ext) {
      verdict.passed = true;
      verdict.assumed = true;
    } else {
      LogicalEnv base;
      for (const Term& h : goal.hyps) base.insert(h);
      for (const Term& j : step.justs) base.insert(j);
      base.insert(mk_eq(v, cur));

      Term vc = mk_binop(surface::rel_binop(step.rel), v, step.rhs);
      if (use_lams) {
        std::vector<Term> carriers = base.items();
        carriers.push_back(vc);
        for (const Term& eq :
             lambda_inst::lambda_instances(carriers, cfg.lambdas))
          base.insert(eq);
      }
      LogicalEnv phi = engine::unfold(defs, base, cfg.smt, cfg.backend);

      Solver s(defs, cfg.smt, cfg.backend);
      s.assert_all(phi);
      verdict.phi_size = phi.size();
      verdict.passed = s.check_valid(vc).is_valid();
      if (!verdict.passed) {
        verdict.vc = vc_text(phi, vc);
        all_steps_ok = false;
      }
    }
    rep.steps.push_back(std::move(verdict));

    try {
      rep.composed =
          (k == 0) ? step.rel : compose_rel(rep.composed, step.rel);
    } catch (const InputError& e) {
      rep.error = e.what();
      return rep;
    }
    cur = step.rhs;
  }

  // Eq-Proof: endpoints must be the goal's two sides, in either
  // orientation, and the composed relation must certify the claim.
  Rel need;
  if (proof.start == goal.lhs && cur == goal.rhs) {
    need = goal.rel;
  } else if (proof.start == goal.rhs && cur == goal.lhs) {
    need = reverse_rel(goal.rel);
  } else {
    rep.error =
        "script endpoints do not match the goal: the chain runs " +
        proof.start.str() + " to " + cur.str();
    return rep;
  }
  if (!rel_certifies(rep.composed, need)) {
    rep.error = std::string("the chain certifies '") +
                surface::rel_text(rep.composed) + "' but the goal claims '" +
                surface::rel_text(goal.rel) + "'";
    return rep;
  }

  rep.passed = all_steps_ok;
  return rep;
}

engine::PleOutcome proof_to_ple_check(const DefEnv& defs,
                                      const reflect::EmbeddedGoal& goal,
                                      const engine::EngineConfig& cfg) {
  return engine::ple_query(defs, goal.hyps,
                           reflect::rel_term(goal.rel, goal.lhs, goal.rhs),
                           cfg);
}

}  // namespace ple::eqproof
