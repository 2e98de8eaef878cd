#include "ple/engine.hpp"

#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "ple/errors.hpp"

namespace ple::engine {

namespace {

// Instances of one application with guards checked through `s`, whose
// assertion base is the Φ the caller is unfolding against.
std::vector<Instance> instantiate_with(Solver& s, const DefEnv& defs,
                                       const Term& app, int iteration) {
  const GuardedDef* d = defs.find(app.n().name);
  if (!d) return {};
  std::vector<Instance> out;
  std::unordered_map<std::string, Term> sub;
  for (size_t i = 0; i < d->params.size(); i++)
    sub.emplace(d->params[i].first, app.args()[i]);
  for (size_t bi = 0; bi < d->branches.size(); bi++) {
    Term guard = substitute(d->branches[bi].guard, sub);
    // Ground-true guards (the common case on literal arguments) skip the
    // solver; anything else, including ground-false ones, goes through it
    // so that inconsistent Φ admits every branch, as validity demands.
    if (!fold_ground(guard, defs).is_bool_lit(true) &&
        !s.check_valid(guard).is_valid())
      continue;
    // Ground-fold the instantiated body so recursive arguments land in
    // normal form (fib(2-1) enters Φ as fib(1)) and unfolding chains stay
    // syntactically connected.
    Term eq =
        mk_eq(app, fold_ground(substitute(d->branches[bi].body, sub), defs));
    out.push_back(Instance{d->name, app.args(), (int)bi, eq, guard, iteration});
  }
  return out;
}

// New lambda subterms and the equalities they induce. Returns true when
// `lams` grew, i.e. instance generation should rerun.
bool collect_lams(const std::vector<Term>& carriers,
                  std::unordered_set<Term, TermHash>& lams) {
  bool grew = false;
  std::vector<const Term*> stack;
  for (const Term& t : carriers) stack.push_back(&t);
  while (!stack.empty()) {
    const Term& t = *stack.back();
    stack.pop_back();
    if (!t.valid()) continue;
    if (t.kind() == TermKind::ULam && lams.insert(t).second) grew = true;
    for (const Term& a : t.args()) stack.push_back(&a);
  }
  return grew;
}

}  // namespace

std::vector<Instance> instantiate(const DefEnv& defs, const LogicalEnv& phi,
                                  const std::string& fname,
                                  const std::vector<Term>& args,
                                  const SmtConfig& cfg,
                                  const SolverBackend& backend) {
  const GuardedDef* d = defs.find(fname);
  if (!d) throw InputError("instantiate: unknown definition '" + fname + "'");
  if (args.size() != d->params.size())
    throw InputError("instantiate: arity mismatch for '" + fname + "'");
  Solver s(defs, cfg, backend);
  s.assert_all(phi);
  return instantiate_with(s, defs, mk_fun(fname, args, d->ret), 0);
}

LogicalEnv unfold(const DefEnv& defs, const LogicalEnv& phi,
                  const SmtConfig& cfg, const SolverBackend& backend,
                  std::vector<Instance>* out_instances) {
  Solver s(defs, cfg, backend);
  s.assert_all(phi);
  LogicalEnv out = phi;
  for (const Term& app : collect_apps(phi.items(), defs))
    for (Instance& in : instantiate_with(s, defs, app, 0)) {
      if (out.insert(in.equality) && out_instances)
        out_instances->push_back(std::move(in));
    }
  return out;
}

LogicalEnv bounded_unfold(const DefEnv& defs, const LogicalEnv& phi, int depth,
                          const SmtConfig& cfg, const SolverBackend& backend) {
  LogicalEnv cur = phi;
  for (int n = 0; n < depth; n++) cur = unfold(defs, cur, cfg, backend);
  return cur;
}

PleOutcome ple_query(const DefEnv& defs, const std::vector<Term>& hyps,
                     const Term& goal, const EngineConfig& cfg) {
  if (!goal.valid() || !goal.sort().is_bool())
    throw InputError("ple_query: goal must be Bool-sorted");

  PleOutcome out;
  out.goal = goal;

  LogicalEnv phi;  // the original Φ
  for (const Term& h : hyps) phi.insert(h);

  // Lambda machinery: once any lambda has been seen, every round's fresh
  // carriers are scanned, since new redexes can pair an old lambda with a
  // new argument. Insertion into the hypothesis set deduplicates.
  std::unordered_set<Term, TermHash> lams;
  bool use_lams = cfg.lambdas.enable_alpha || cfg.lambdas.enable_beta;
  auto lam_instances = [&](LogicalEnv& target,
                           const std::vector<Term>& carriers) {
    if (!use_lams) return;
    collect_lams(carriers, lams);
    if (lams.empty()) return;
    for (Term& eq : lambda_inst::lambda_instances(carriers, cfg.lambdas))
      target.insert(eq);
  };

  // Seed Φ_0: instances over the goal's applications, guards against Φ.
  LogicalEnv cur = phi;
  {
    Solver s(defs, cfg.smt, cfg.backend);
    s.assert_all(phi);
    out.phi_snapshots.push_back(phi.items());
    for (const Term& app : collect_apps(goal, defs))
      for (Instance& in : instantiate_with(s, defs, app, 0))
        if (cur.insert(in.equality)) out.instances.push_back(std::move(in));
    std::vector<Term> carriers = cur.items();
    carriers.push_back(goal);
    lam_instances(cur, carriers);
  }

  // Applications already unfolded (some branch admitted); their guards stay
  // valid under growing Φ, so rechecking them would only repeat work.
  std::unordered_set<Term, TermHash> resolved;
  for (const Instance& in : out.instances)
    resolved.insert(in.equality.args()[0]);

  for (int i = 0;; i++) {
    if (i >= cfg.max_iters) {
      out.status = PleStatus::Aborted;
      out.abort_reason = "iteration-cap";
      break;
    }

    Solver s(defs, cfg.smt, cfg.backend);
    s.assert_all(cur);
    out.phi_sizes.push_back(cur.size());
    SmtResult r = s.check_valid(goal);
    out.iterations = i + 1;
    if (r.verdict == SmtVerdict::Valid) {
      out.status = PleStatus::Proved;
      break;
    }
    if (r.verdict == SmtVerdict::Unknown) {
      out.status = PleStatus::Aborted;
      out.abort_reason = "unknown:" + r.unknown_reason;
      break;
    }

    // Φ_{i+1} = Φ ∪ Unfold(Λ, Φ_i); since Unfold's result contains Φ_i this
    // is Φ_i plus the new instance equalities (and lambda equalities).
    // The goal rides along as an unfolding carrier: the loop's chain
    // variable keeps the goal's applications inside Φ, so their guards are
    // retried as instances accumulate.
    LogicalEnv next = cur;
    out.phi_snapshots.push_back(cur.items());
    std::vector<Term> added;
    std::vector<Term> carriers = cur.items();
    carriers.push_back(goal);
    for (const Term& app : collect_apps(carriers, defs)) {
      if (resolved.count(app)) continue;
      for (Instance& in : instantiate_with(s, defs, app, i + 1)) {
        resolved.insert(app);
        if (next.insert(in.equality)) {
          added.push_back(in.equality);
          out.instances.push_back(std::move(in));
        }
      }
    }
    if ((int64_t)out.instances.size() > cfg.max_instances) {
      out.status = PleStatus::Aborted;
      out.abort_reason = "instance-cap";
      out.iterations = i + 1;
      break;
    }
    lam_instances(next, added);

    if (next.subset_of(cur)) {
      out.status = PleStatus::UnprovedFixpoint;
      break;
    }
    cur = std::move(next);
  }

  out.final_phi = std::move(cur);
  out.instance_count = (int64_t)out.instances.size();
  return out;
}

LogicalTrace extract_trace(const DefEnv& defs, const PleOutcome& out) {
  LogicalTrace tr;
  for (size_t k = 0; k < out.instances.size(); k++) {
    const Instance& in = out.instances[k];
    const Term& head = in.equality.args()[0];
    for (const Term& app : collect_apps(in.equality.args()[1], defs))
      tr.steps.push_back(LogicalStep{head, app, (int)k});
  }
  return tr;
}

std::string trace_json(const DefEnv& defs, const PleOutcome& out) {
  nlohmann::json j;
  j["version"] = 1;
  switch (out.status) {
    case PleStatus::Proved:
      j["status"] = "proved";
      break;
    case PleStatus::UnprovedFixpoint:
      j["status"] = "unproved-fixpoint";
      break;
    case PleStatus::Aborted:
      j["status"] = "aborted";
      break;
  }
  j["iterations"] = out.iterations;
  j["instance_count"] = out.instance_count;
  if (!out.abort_reason.empty()) j["abort_reason"] = out.abort_reason;
  j["goal"] = out.goal.valid() ? out.goal.str() : "";
  j["phi_sizes"] = out.phi_sizes;
  nlohmann::json insts = nlohmann::json::array();
  for (const Instance& in : out.instances) {
    nlohmann::json ji;
    ji["fname"] = in.fname;
    nlohmann::json args = nlohmann::json::array();
    for (const Term& a : in.args) args.push_back(a.str());
    ji["args"] = args;
    ji["branch"] = in.branch;
    ji["equality"] = in.equality.str();
    ji["guard"] = in.guard.str();
    ji["iteration"] = in.iteration;
    insts.push_back(std::move(ji));
  }
  j["instances"] = std::move(insts);
  nlohmann::json steps = nlohmann::json::array();
  for (const LogicalStep& st : extract_trace(defs, out).steps) {
    nlohmann::json js;
    js["from"] = st.from.str();
    js["to"] = st.to.str();
    js["instance"] = st.instance;
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  return j.dump(2);
}

}  // namespace ple::engine
