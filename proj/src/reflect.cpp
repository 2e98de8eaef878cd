#include "ple/reflect.hpp"

#include <algorithm>
#include <unordered_map>

#include "ple/errors.hpp"

namespace ple::reflect {

namespace {

struct EmbedCtx {
  const DefEnv& env;
  std::vector<std::string>* warnings = nullptr;
  std::string owner;
  int next_placeholder = 0;
  // One completion constant per (owner, sort); first one is undef_<owner>.
  std::vector<std::pair<Sort, std::string>> undefs{};

  std::string undef_for(Sort s) {
    for (const auto& [srt, nm] : undefs)
      if (srt == s) return nm;
    std::string nm = "undef_" + owner;
    if (!undefs.empty()) nm += "_" + std::to_string(undefs.size() + 1);
    undefs.emplace_back(s, nm);
    return nm;
  }

  void warn(std::string w) {
    if (warnings) warnings->push_back(std::move(w));
  }
};

Term embed(const surface::ExprPtr& e, const Scope& sc, EmbedCtx& cx);

Term embed_case(const surface::Expr& e, const Scope& sc, EmbedCtx& cx) {
  Term scrut = embed(e.args[0], sc, cx);
  const surface::SType& st = e.args[0]->stype;
  if (!st.valid() || !st.is_data())
    throw ReflectError("case scrutinee is not of a datatype sort");
  const Datatype* dt = cx.env.find_datatype(st.data_name());
  if (!dt)
    throw ReflectError("case scrutinee type '" + st.data_name() +
                       "' is not declared");

  std::unordered_map<std::string, const surface::CaseAlt*> by_con;
  const surface::CaseAlt* wild = nullptr;
  for (const surface::CaseAlt& alt : e.alts) {
    if (alt.wildcard)
      wild = &alt;
    else
      by_con[alt.con] = &alt;
  }

  // Arms in declaration order; binders become selector applications.
  std::vector<std::pair<const Constructor*, Term>> arms;
  for (const std::string& cname : dt->constructors) {
    auto it = by_con.find(cname);
    if (it == by_con.end()) continue;
    const surface::CaseAlt& alt = *it->second;
    const Constructor* con = cx.env.find_constructor(cname);
    Scope inner = sc;
    for (size_t j = 0; j < alt.binders.size(); j++)
      inner[alt.binders[j]] =
          mk_fun(con->selectors[j], {scrut}, con->fields[j].sort);
    arms.emplace_back(con, embed(alt.body, inner, cx));
  }

  Term els;
  if (wild) {
    els = embed(wild->body, sc, cx);
  } else if (arms.size() == dt->constructors.size()) {
    els = arms.back().second;
    arms.pop_back();
  } else {
    // Partial case (buildable only through the API; sort-checked programs
    // are exhaustive): complete with an uninterpreted constant.
    Sort s = e.stype.core();
    std::string nm = cx.undef_for(s);
    std::string missing;
    for (const std::string& cname : dt->constructors)
      if (!by_con.count(cname)) {
        if (!missing.empty()) missing += ", ";
        missing += cname;
      }
    cx.warn("case on '" + dt->name + "' in '" + cx.owner +
            "' does not cover " + missing +
            "; completed with uninterpreted constant " + nm);
    els = mk_fun(nm, {}, s);
  }

  Term out = els;
  for (auto it = arms.rbegin(); it != arms.rend(); ++it)
    out = mk_ite(mk_fun(it->first->checker, {scrut}, Sort::bool_()),
                 it->second, out);
  return out;
}

Term embed_lam(const surface::Expr& e, const Scope& sc, EmbedCtx& cx) {
  Sort argsort = e.stype.arg().core();
  // Embed the body against a placeholder, then pick the binder index one
  // above every lambda index the body ended up with.
  std::string ph = "%ph" + std::to_string(cx.next_placeholder++);
  Scope inner = sc;
  inner[e.name] = mk_var(ph, argsort);
  Term body = embed(e.args[0], inner, cx);
  int idx = max_ulam_binder(body) + 1;
  body = substitute(body, {{ph, pool_var(argsort, idx)}});
  return mk_ulam(idx, body, argsort);
}

Term embed(const surface::ExprPtr& ep, const Scope& sc, EmbedCtx& cx) {
  const surface::Expr& e = *ep;
  switch (e.kind) {
    case surface::ExprKind::IntLit:
      return mk_int(e.ival);
    case surface::ExprKind::BoolLit:
      return mk_bool(e.bval);
    case surface::ExprKind::Var: {
      auto it = sc.find(e.name);
      if (it == sc.end())
        throw ReflectError("unbound variable '" + e.name + "' in embedding");
      return it->second;
    }
    case surface::ExprKind::Con: {
      std::vector<Term> args;
      args.reserve(e.args.size());
      for (const surface::ExprPtr& a : e.args) args.push_back(embed(a, sc, cx));
      return mk_con(e.name, std::move(args));
    }
    case surface::ExprKind::App: {
      if (e.def_call) {
        // Fully applied reflected symbol: head is the definition's name.
        std::vector<Term> args;
        args.reserve(e.args.size() - 1);
        for (size_t i = 1; i < e.args.size(); i++)
          args.push_back(embed(e.args[i], sc, cx));
        return mk_fun(e.args[0]->name, std::move(args), e.stype.core());
      }
      Term h = embed(e.args[0], sc, cx);
      for (size_t i = 1; i < e.args.size(); i++)
        h = mk_uapp(h, embed(e.args[i], sc, cx));
      return h;
    }
    case surface::ExprKind::Lam:
      return embed_lam(e, sc, cx);
    case surface::ExprKind::Ite:
      return mk_ite(embed(e.args[0], sc, cx), embed(e.args[1], sc, cx),
                    embed(e.args[2], sc, cx));
    case surface::ExprKind::Case:
      return embed_case(e, sc, cx);
    case surface::ExprKind::BinOp:
      return mk_binop(e.bop, embed(e.args[0], sc, cx),
                      embed(e.args[1], sc, cx));
    case surface::ExprKind::UnOp:
      return mk_not(embed(e.args[0], sc, cx));
  }
  throw ReflectError("unreachable expression kind");
}

bool contains_ite(const Term& t) {
  if (t.kind() == TermKind::Ite) return true;
  for (const Term& a : t.args())
    if (contains_ite(a)) return true;
  return false;
}

// Leftmost-outermost Ite whose own condition is already Ite-free; returns
// its path from the root. Lambda bodies may not contain Ite at all.
bool find_ite(const Term& t, std::vector<int>& path) {
  if (t.kind() == TermKind::ULam) {
    if (contains_ite(t.args()[0]))
      throw ReflectError(
          "if-then-else under a lambda; hoist the lambda into a named "
          "reflected definition");
    return false;
  }
  if (t.kind() == TermKind::Ite) {
    path.push_back(0);
    if (find_ite(t.args()[0], path)) return true;
    path.pop_back();
    return true;
  }
  for (int i = 0; i < (int)t.args().size(); i++) {
    path.push_back(i);
    if (find_ite(t.args()[i], path)) return true;
    path.pop_back();
  }
  return false;
}

Term node_at(const Term& t, const std::vector<int>& path, size_t k) {
  return k == path.size() ? t : node_at(t.args()[path[k]], path, k + 1);
}

Term rebuild_with(const Term& t, std::vector<Term> args) {
  switch (t.kind()) {
    case TermKind::ConApp:
      return mk_con(t.n().name, std::move(args));
    case TermKind::FunApp:
      return mk_fun(t.n().name, std::move(args), t.sort());
    case TermKind::BinOp:
      return mk_binop(t.n().bop, args[0], args[1]);
    case TermKind::UnOp:
      return mk_not(args[0]);
    case TermKind::Ite:
      return mk_ite(args[0], args[1], args[2]);
    case TermKind::UApp:
      return mk_uapp(args[0], args[1]);
    default:
      throw ReflectError("cannot rebuild leaf term");
  }
}

Term replace_at(const Term& t, const std::vector<int>& path, size_t k,
                const Term& repl) {
  if (k == path.size()) return repl;
  std::vector<Term> args(t.args().begin(), t.args().end());
  args[path[k]] = replace_at(args[path[k]], path, k + 1, repl);
  return rebuild_with(t, std::move(args));
}

void split_ites(const Term& t, std::vector<Term>& guards,
                std::vector<Branch>& out) {
  std::vector<int> path;
  if (!find_ite(t, path)) {
    out.push_back({mk_conj(guards), t});
    return;
  }
  Term ite = node_at(t, path, 0);
  Term c = ite.args()[0];
  guards.push_back(c);
  split_ites(replace_at(t, path, 0, ite.args()[1]), guards, out);
  guards.pop_back();
  guards.push_back(mk_not(c));
  split_ites(replace_at(t, path, 0, ite.args()[2]), guards, out);
  guards.pop_back();
}

}  // namespace

void declare_datatype(DefEnv& env, const surface::DataDecl& d) {
  Datatype dt;
  dt.name = d.name;
  std::vector<Constructor> cons;
  for (const surface::DataDecl::Con& c : d.cons) {
    dt.constructors.push_back(c.name);
    Constructor k;
    k.name = c.name;
    k.datatype = d.name;
    k.checker = "is_" + c.name;
    for (size_t j = 0; j < c.fields.size(); j++) {
      const surface::SType& f = c.fields[j];
      k.fields.push_back(
          {f.core(), f.is_data() ? f.data_name() : std::string()});
      k.selectors.push_back("sel_" + c.name + "_" + std::to_string(j + 1));
    }
    cons.push_back(std::move(k));
  }
  env.add_datatype(dt, cons);
}

Term embed_expr(const DefEnv& env, const surface::ExprPtr& e,
                const Scope& scope, std::vector<std::string>* warnings,
                const std::string& owner) {
  EmbedCtx cx{env, warnings, owner};
  return embed(e, scope, cx);
}

std::vector<Branch> def_if(const Term& body) {
  std::vector<Branch> out;
  std::vector<Term> guards;
  split_ites(body, guards, out);
  // Merge adjacent branches with structurally equal bodies.
  std::vector<Branch> merged;
  for (Branch& b : out) {
    if (!merged.empty() && merged.back().body == b.body)
      merged.back().guard =
          mk_binop(BinOpKind::Or, merged.back().guard, b.guard);
    else
      merged.push_back(std::move(b));
  }
  return merged;
}

GuardedDef reflect_function(DefEnv& env, const surface::ReflectDef& def,
                            std::vector<std::string>* warnings) {
  Scope sc;
  std::vector<std::pair<std::string, Sort>> params;
  params.reserve(def.params.size());
  for (const auto& [pn, pt] : def.params) {
    Sort s = pt.core();
    sc.emplace(pn, mk_var(pn, s));
    params.emplace_back(pn, s);
  }
  EmbedCtx cx{env, warnings, def.name};
  Term body = embed(def.body, sc, cx);
  std::vector<Branch> branches = def_if(body);
  for (const Branch& b : branches)
    if (contains_ulam(b.guard) || contains_ulam(b.body))
      throw ReflectError("definition '" + def.name +
                         "' keeps a lambda in a reflected branch; hoist the "
                         "lambda into a named reflected definition");
  GuardedDef g{def.name, std::move(params), def.ret.core(),
               std::move(branches)};
  env.add_def(g);
  return g;
}

Term rel_term(surface::Rel r, const Term& lhs, const Term& rhs) {
  return mk_binop(surface::rel_binop(r), lhs, rhs);
}

Module reflect_program(const surface::Program& p) {
  Module m;
  for (const surface::DataDecl& d : p.datatypes) declare_datatype(m.env, d);
  for (const surface::ReflectDef& f : p.defs)
    reflect_function(m.env, f, &m.warnings);

  for (const surface::GoalDecl& g : p.goals) {
    EmbeddedGoal eg;
    eg.name = g.name;
    eg.mode = g.mode;
    eg.rel = g.rel;
    Scope sc;
    for (const auto& [n, st] : g.free_vars) {
      Sort s = st.core();
      sc.emplace(n, mk_var(n, s));
      eg.frees.push_back(
          {n, s, st.is_data() ? st.data_name() : std::string()});
    }
    EmbedCtx cx{m.env, &m.warnings, g.name};
    for (const surface::ExprPtr& h : g.hyps)
      eg.hyps.push_back(embed(h, sc, cx));
    eg.lhs = embed(g.lhs, sc, cx);
    eg.rhs = embed(g.rhs, sc, cx);
    m.goals.push_back(std::move(eg));
  }

  for (const surface::ProofDecl& pr : p.proofs) {
    EmbeddedProof ep;
    ep.name = pr.name;
    ep.goal = pr.goal;
    Scope sc;
    for (const auto& [n, st] : pr.free_vars) {
      Sort s = st.core();
      sc.emplace(n, mk_var(n, s));
      ep.frees.push_back(
          {n, s, st.is_data() ? st.data_name() : std::string()});
    }
    EmbedCtx cx{m.env, &m.warnings, pr.name};
    ep.start = embed(pr.start, sc, cx);
    for (const surface::ProofStep& st : pr.steps) {
      EmbeddedStep es;
      es.rel = st.rel;
      es.ext = st.ext;
      es.rhs = embed(st.rhs, sc, cx);
      for (const surface::Justification& j : st.justs)
        es.justs.push_back(embed(j.expr, sc, cx));
      ep.steps.push_back(std::move(es));
    }
    m.proofs.push_back(std::move(ep));
  }
  return m;
}

}  // namespace ple::reflect
