#include "ple/smt.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <csignal>
#include <map>
#include <set>
#include <sstream>

#include "ple/errors.hpp"
#include "solver_core.hpp"

namespace ple {

using solver::CC;
using solver::Context;
using solver::LinForm;
using solver::NodeKind;
using solver::Rat;
using solver::Simplex;
using solver::lin_add;
using solver::lin_scale;
using solver::lin_sub;

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;
using BigInt = boost::multiprecision::cpp_int;

BigInt big_gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

BigInt rat_floor(const Rat& r) {
  BigInt n = numerator(r), d = denominator(r);
  BigInt q = n / d;
  if (n % d != 0 && (n < 0) != (d < 0)) q -= 1;
  return q;
}

// ---- Propositional skeleton ------------------------------------------------

struct PExpr {
  enum K { True, False, Lit, And, Or, Not, Iff } k = True;
  int lit = 0;  // Lit: +-(atom+1)
  std::vector<PExpr> kids;
};

PExpr p_true() { return {}; }
PExpr p_false() { return {PExpr::False, 0, {}}; }
PExpr p_lit(int l) { return {PExpr::Lit, l, {}}; }

PExpr p_not(PExpr a) {
  switch (a.k) {
    case PExpr::True: return p_false();
    case PExpr::False: return p_true();
    case PExpr::Lit: a.lit = -a.lit; return a;
    case PExpr::Not: return a.kids[0];
    default: {
      PExpr r{PExpr::Not, 0, {std::move(a)}};
      return r;
    }
  }
}

PExpr p_and(std::vector<PExpr> xs) {
  std::vector<PExpr> kids;
  for (auto& x : xs) {
    if (x.k == PExpr::False) return p_false();
    if (x.k == PExpr::True) continue;
    kids.push_back(std::move(x));
  }
  if (kids.empty()) return p_true();
  if (kids.size() == 1) return kids[0];
  return {PExpr::And, 0, std::move(kids)};
}

PExpr p_or(std::vector<PExpr> xs) {
  std::vector<PExpr> kids;
  for (auto& x : xs) {
    if (x.k == PExpr::True) return p_true();
    if (x.k == PExpr::False) continue;
    kids.push_back(std::move(x));
  }
  if (kids.empty()) return p_false();
  if (kids.size() == 1) return kids[0];
  return {PExpr::Or, 0, std::move(kids)};
}

PExpr p_iff(PExpr a, PExpr b) {
  if (a.k == PExpr::True) return b;
  if (b.k == PExpr::True) return a;
  if (a.k == PExpr::False) return p_not(std::move(b));
  if (b.k == PExpr::False) return p_not(std::move(a));
  return {PExpr::Iff, 0, {std::move(a), std::move(b)}};
}

PExpr p_imp(PExpr a, PExpr b) {
  std::vector<PExpr> xs;
  xs.push_back(p_not(std::move(a)));
  xs.push_back(std::move(b));
  return p_or(std::move(xs));
}

// ---- Theory atoms ----------------------------------------------------------

struct AtomInfo {
  enum K { BoolNode, EqUniv, LinLe, LinEq } k;
  int a = -1, b = -1;  // BoolNode: a; EqUniv/LinEq: node pair
  LinForm lin;         // LinLe: lin <= 0; LinEq: lin == 0
};

// Scale to integer coefficients; returns the common scale applied.
LinForm to_integer(const LinForm& f) {
  BigInt l = denominator(f.k);
  for (const auto& [n, c] : f.terms) {
    BigInt d = denominator(c);
    l = l / big_gcd(l, d) * d;
  }
  return lin_scale(f, Rat(l));
}

BigInt coeff_gcd(const LinForm& f) {
  BigInt g = 0;
  for (const auto& [n, c] : f.terms) g = big_gcd(g, numerator(c));
  if (g < 0) g = -g;
  return g;
}

// f <= 0 over ints, gcd-tightened: terms/g + ceil(k/g) <= 0.
LinForm tighten_le(const LinForm& f) {
  LinForm g = to_integer(f);
  BigInt d = coeff_gcd(g);
  if (d <= 1) return g;
  LinForm out = lin_scale(g, Rat(1, d));
  out.k = Rat(-rat_floor(-out.k));
  return out;
}

// f == 0 over ints; nullopt when statically unsatisfiable (gcd test).
std::optional<LinForm> tighten_eq(const LinForm& f) {
  LinForm g = to_integer(f);
  if (g.terms.empty()) return g;
  BigInt d = coeff_gcd(g);
  LinForm out = lin_scale(g, Rat(1, d));
  if (denominator(out.k) != 1) return std::nullopt;
  if (out.terms[0].second < 0) out = lin_scale(out, Rat(-1));
  return out;
}

// ---- Term -> skeleton + atoms ---------------------------------------------

struct Translator {
  Context& ctx;
  std::vector<AtomInfo> atoms;
  std::unordered_map<std::string, int> atom_table;
  std::vector<Term> sides;  // constraints added by lifting/bridging
  std::map<std::string, int> user_vars;
  int fresh = 0;
  std::unordered_map<Term, Term, TermHash> lift_memo;

  explicit Translator(Context& c) : ctx(c) {}

  int atom_of(const std::string& key, AtomInfo info) {
    auto it = atom_table.find(key);
    if (it != atom_table.end()) return it->second;
    int id = (int)atoms.size();
    atoms.push_back(std::move(info));
    atom_table.emplace(key, id);
    return id;
  }

  bool atomic_bool(const Term& t) const {
    switch (t.kind()) {
      case TermKind::Var:
      case TermKind::BoolLit:
      case TermKind::FunApp:
      case TermKind::UApp:
        return true;
      default:
        return false;
    }
  }

  Term fresh_var(const char* stem, Sort s) {
    return mk_var("%" + std::string(stem) + std::to_string(fresh++), s);
  }

  Term bridge_bool_arg(Term a) {
    if (!a.sort().is_bool() || atomic_bool(a)) return a;
    Term v = fresh_var("bv", Sort::bool_());
    sides.push_back(mk_eq(v, a));
    return v;
  }

  // Hoists non-bool Ites to fresh vars and bridges boolean-connective
  // arguments of applications, so the atomic translator below never sees
  // either shape outside lambda bodies.
  Term lift(const Term& t, int lam) {
    if (lam == 0) {
      auto it = lift_memo.find(t);
      if (it != lift_memo.end()) return it->second;
    }
    Term out;
    switch (t.kind()) {
      case TermKind::IntLit:
      case TermKind::BoolLit:
      case TermKind::Var:
        out = t;
        break;
      case TermKind::ConApp:
      case TermKind::FunApp: {
        std::vector<Term> args;
        for (const auto& a : t.args()) {
          Term la = lift(a, lam);
          if (lam == 0) la = bridge_bool_arg(la);
          args.push_back(la);
        }
        out = t.kind() == TermKind::ConApp
                  ? mk_con(t.n().name, std::move(args))
                  : mk_fun(t.n().name, std::move(args), t.sort());
        break;
      }
      case TermKind::BinOp:
        out = mk_binop(t.n().bop, lift(t.args()[0], lam), lift(t.args()[1], lam));
        break;
      case TermKind::UnOp:
        out = mk_not(lift(t.args()[0], lam));
        break;
      case TermKind::Ite: {
        Term c = lift(t.args()[0], lam);
        Term a = lift(t.args()[1], lam);
        Term b = lift(t.args()[2], lam);
        if (t.sort().is_bool()) {
          out = mk_ite(c, a, b);
        } else if (lam > 0) {
          throw SolverError("ite of sort " + t.sort().str() +
                            " under a lambda cannot be lifted");
        } else {
          Term v = fresh_var("ite", t.sort());
          sides.push_back(mk_binop(BinOpKind::Imp, c, mk_eq(v, a)));
          sides.push_back(mk_binop(BinOpKind::Imp, mk_not(c), mk_eq(v, b)));
          out = v;
        }
        break;
      }
      case TermKind::ULam:
        out = mk_ulam(t.n().binder, lift(t.args()[0], lam + 1),
                      t.sort().fun_arg());
        break;
      case TermKind::UApp: {
        Term f = lift(t.args()[0], lam);
        Term a = lift(t.args()[1], lam);
        if (lam == 0) a = bridge_bool_arg(a);
        out = mk_uapp(f, a);
        break;
      }
    }
    if (lam == 0) lift_memo.emplace(t, out);
    return out;
  }

  // Linear view of an Int term; atoms are interned nodes.
  LinForm lin_term(const Term& t) {
    switch (t.kind()) {
      case TermKind::IntLit:
        return LinForm{Rat(t.n().ival), {}};
      case TermKind::BinOp: {
        BinOpKind op = t.n().bop;
        if (op == BinOpKind::Add)
          return lin_add(lin_term(t.args()[0]), lin_term(t.args()[1]));
        if (op == BinOpKind::Sub)
          return lin_sub(lin_term(t.args()[0]), lin_term(t.args()[1]));
        if (op == BinOpKind::Mul) {
          LinForm a = lin_term(t.args()[0]);
          LinForm b = lin_term(t.args()[1]);
          if (a.terms.empty()) return lin_scale(b, a.k);
          if (b.terms.empty()) return lin_scale(a, b.k);
          throw SolverError("nonlinear multiplication: " + t.str());
        }
        throw SolverError("non-arithmetic operator in integer term");
      }
      default:
        return LinForm{Rat(0), {{node_of(t), Rat(1)}}};
    }
  }

  // Term -> context node for atomic positions. Boolean structure under
  // lambdas is encoded with opaque operator nodes: sound for congruence,
  // never unfolded here.
  int node_of(const Term& t) {
    if (t.sort().is_int()) {
      switch (t.kind()) {
        case TermKind::IntLit:
        case TermKind::BinOp:
        case TermKind::Ite:
          return ctx.mk_lin(lin_term(t));
        default:
          break;
      }
    }
    switch (t.kind()) {
      case TermKind::BoolLit:
        return t.n().bval ? ctx.true_node() : ctx.false_node();
      case TermKind::Var: {
        int n = ctx.mk_var(t.n().name, t.sort());
        if (t.n().name[0] != '%') user_vars.emplace(t.n().name, n);
        return n;
      }
      case TermKind::ConApp: {
        std::vector<int> args;
        for (const auto& a : t.args()) args.push_back(node_of(a));
        return ctx.mk_con(t.n().name, std::move(args));
      }
      case TermKind::FunApp: {
        std::vector<int> args;
        for (const auto& a : t.args()) args.push_back(node_of(a));
        return ctx.mk_fun(t.n().name, std::move(args), t.sort());
      }
      case TermKind::ULam:
        return ctx.mk_ulam(t.n().binder, node_of(t.args()[0]), t.sort());
      case TermKind::UApp:
        return ctx.mk_uapp(node_of(t.args()[0]), node_of(t.args()[1]),
                           t.sort());
      case TermKind::BinOp: {
        int a = node_of(t.args()[0]);
        int b = node_of(t.args()[1]);
        std::string op = "%op" + std::to_string((int)t.n().bop);
        return ctx.mk_fun(op, {a, b}, t.sort());
      }
      case TermKind::UnOp:
        return ctx.mk_fun("%opnot", {node_of(t.args()[0])}, t.sort());
      case TermKind::Ite: {
        int c = node_of(t.args()[0]);
        int a = node_of(t.args()[1]);
        int b = node_of(t.args()[2]);
        return ctx.mk_fun("%opite", {c, a, b}, t.sort());
      }
      default:
        throw SolverError("unexpected term in atomic position: " + t.str());
    }
  }

  PExpr le_expr(LinForm f) {
    if (f.terms.empty()) return f.k <= 0 ? p_true() : p_false();
    f = tighten_le(f);
    AtomInfo info{AtomInfo::LinLe, -1, -1, f};
    return p_lit(atom_of("L#" + f.key(), std::move(info)) + 1);
  }

  PExpr eq_int_expr(const Term& a, const Term& b) {
    LinForm fa = lin_term(a), fb = lin_term(b);
    auto d = tighten_eq(lin_sub(fa, fb));
    if (!d) return p_false();
    if (d->terms.empty()) return d->k == 0 ? p_true() : p_false();
    AtomInfo info{AtomInfo::LinEq, ctx.mk_lin(fa), ctx.mk_lin(fb), *d};
    return p_lit(atom_of("E#" + d->key(), std::move(info)) + 1);
  }

  PExpr eq_univ_expr(const Term& a, const Term& b) {
    int na = node_of(a), nb = node_of(b);
    if (na == nb) return p_true();
    if (na > nb) std::swap(na, nb);
    AtomInfo info{AtomInfo::EqUniv, na, nb, {}};
    std::string key = "U#" + std::to_string(na) + "#" + std::to_string(nb);
    return p_lit(atom_of(key, std::move(info)) + 1);
  }

  PExpr bool_atom(const Term& t) {
    int n = node_of(t);
    if (n == ctx.true_node()) return p_true();
    if (n == ctx.false_node()) return p_false();
    AtomInfo info{AtomInfo::BoolNode, n, -1, {}};
    return p_lit(atom_of("B#" + std::to_string(n), std::move(info)) + 1);
  }

  PExpr translate(const Term& t) {
    switch (t.kind()) {
      case TermKind::BoolLit:
        return t.n().bval ? p_true() : p_false();
      case TermKind::Var:
      case TermKind::FunApp:
      case TermKind::UApp:
        return bool_atom(t);
      case TermKind::UnOp:
        return p_not(translate(t.args()[0]));
      case TermKind::Ite: {
        PExpr c = translate(t.args()[0]);
        PExpr a = translate(t.args()[1]);
        PExpr b = translate(t.args()[2]);
        PExpr nc = p_not(c);
        std::vector<PExpr> l, r;
        l.push_back(std::move(c));
        l.push_back(std::move(a));
        r.push_back(std::move(nc));
        r.push_back(std::move(b));
        std::vector<PExpr> o;
        o.push_back(p_and(std::move(l)));
        o.push_back(p_and(std::move(r)));
        return p_or(std::move(o));
      }
      case TermKind::BinOp: {
        const Term& a = t.args()[0];
        const Term& b = t.args()[1];
        switch (t.n().bop) {
          case BinOpKind::And: {
            std::vector<PExpr> xs;
            xs.push_back(translate(a));
            xs.push_back(translate(b));
            return p_and(std::move(xs));
          }
          case BinOpKind::Or: {
            std::vector<PExpr> xs;
            xs.push_back(translate(a));
            xs.push_back(translate(b));
            return p_or(std::move(xs));
          }
          case BinOpKind::Imp:
            return p_imp(translate(a), translate(b));
          case BinOpKind::Eq:
          case BinOpKind::Ne: {
            PExpr e;
            if (a.sort().is_bool())
              e = p_iff(translate(a), translate(b));
            else if (a.sort().is_int())
              e = eq_int_expr(a, b);
            else
              e = eq_univ_expr(a, b);
            return t.n().bop == BinOpKind::Eq ? e : p_not(std::move(e));
          }
          case BinOpKind::Le:
            return le_expr(lin_sub(lin_term(a), lin_term(b)));
          case BinOpKind::Lt: {
            LinForm f = lin_sub(lin_term(a), lin_term(b));
            f.k += 1;
            return le_expr(std::move(f));
          }
          case BinOpKind::Ge:
            return le_expr(lin_sub(lin_term(b), lin_term(a)));
          case BinOpKind::Gt: {
            LinForm f = lin_sub(lin_term(b), lin_term(a));
            f.k += 1;
            return le_expr(std::move(f));
          }
          default:
            throw SolverError("arithmetic operator at formula position");
        }
      }
      default:
        throw SolverError("term is not a formula: " + t.str());
    }
  }
};

// ---- Tseitin ---------------------------------------------------------------

struct Cnf {
  int nvars = 0;
  std::vector<std::vector<int>> clauses;
  bool root_false = false;

  int tseitin(const PExpr& e) {
    switch (e.k) {
      case PExpr::Lit:
        return e.lit;
      case PExpr::Not:
        return -tseitin(e.kids[0]);
      case PExpr::And: {
        std::vector<int> ls;
        for (const auto& k : e.kids) ls.push_back(tseitin(k));
        int v = ++nvars;
        std::vector<int> big{v};
        for (int l : ls) {
          clauses.push_back({-v, l});
          big.push_back(-l);
        }
        clauses.push_back(std::move(big));
        return v;
      }
      case PExpr::Or: {
        std::vector<int> ls;
        for (const auto& k : e.kids) ls.push_back(tseitin(k));
        int v = ++nvars;
        std::vector<int> big{-v};
        for (int l : ls) {
          clauses.push_back({v, -l});
          big.push_back(l);
        }
        clauses.push_back(std::move(big));
        return v;
      }
      case PExpr::Iff: {
        int a = tseitin(e.kids[0]);
        int b = tseitin(e.kids[1]);
        int v = ++nvars;
        clauses.push_back({-v, -a, b});
        clauses.push_back({-v, a, -b});
        clauses.push_back({v, a, b});
        clauses.push_back({v, -a, -b});
        return v;
      }
      default:
        throw SolverError("constant in tseitin");
    }
  }

  void add_root(const PExpr& e) {
    if (e.k == PExpr::True) return;
    if (e.k == PExpr::False) {
      root_false = true;
      return;
    }
    clauses.push_back({tseitin(e)});
  }
};

// ---- Chronological DPLL core ----------------------------------------------

struct SatCore {
  std::vector<std::vector<int>> clauses;
  std::vector<int8_t> val;  // 1-indexed; 0 unassigned
  struct TE {
    int lit;
    bool dec;
    bool flipped;
  };
  std::vector<TE> trail;

  SatCore(int nvars, std::vector<std::vector<int>> cs)
      : clauses(std::move(cs)), val(nvars + 1, 0) {}

  bool lit_true(int l) const {
    int8_t v = val[std::abs(l)];
    return v != 0 && (v > 0) == (l > 0);
  }
  bool lit_false(int l) const {
    int8_t v = val[std::abs(l)];
    return v != 0 && (v > 0) != (l > 0);
  }

  bool assign(int lit, bool dec) {
    int v = std::abs(lit);
    if (val[v] != 0) return (val[v] > 0) == (lit > 0);
    val[v] = lit > 0 ? 1 : -1;
    trail.push_back({lit, dec, false});
    return true;
  }

  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& c : clauses) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : c) {
          if (lit_true(l)) {
            sat = true;
            break;
          }
          if (!lit_false(l)) {
            unassigned++;
            last = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          assign(last, false);
          changed = true;
        }
      }
    }
    return true;
  }

  bool backtrack() {
    int i = (int)trail.size() - 1;
    while (i >= 0 && !(trail[i].dec && !trail[i].flipped)) i--;
    if (i < 0) return false;
    for (int j = (int)trail.size() - 1; j > i; j--) val[std::abs(trail[j].lit)] = 0;
    trail.resize(i + 1);
    trail[i].lit = -trail[i].lit;
    trail[i].flipped = true;
    val[std::abs(trail[i].lit)] = trail[i].lit > 0 ? 1 : -1;
    return true;
  }

  int pick_unassigned() const {
    for (size_t v = 1; v < val.size(); v++)
      if (val[v] == 0) return (int)v;
    return 0;
  }
};

// ---- Theory checking -------------------------------------------------------

struct TheoryCheck {
  Context& ctx;
  const std::vector<AtomInfo>& atoms;
  const std::vector<int8_t>& av;  // atom assignment, index = atom id
  const SmtConfig& cfg;
  int64_t* budget;
  const std::map<std::string, int>& user_vars;

  std::string reason;
  SmtModel model;

  Rat eval_lin(const LinForm& f, const Simplex& spx) const {
    Rat v = f.k;
    for (const auto& [n, c] : f.terms) v += c * spx.value(n);
    return v;
  }

  // 1 sat, 0 unsat, -1 unknown
  int attempt(const std::vector<LinForm>& extra, int depth, bool complete) {
    if (*budget <= 0) {
      reason = "budget";
      return -1;
    }
    CC cc(ctx);
    Simplex spx(budget);
    std::vector<std::pair<int, int>> int_diseqs;

    for (size_t i = 0; i < atoms.size(); i++) {
      if (av[i] == 0) continue;
      const AtomInfo& at = atoms[i];
      bool pos = av[i] > 0;
      switch (at.k) {
        case AtomInfo::BoolNode:
          cc.merge(at.a, pos ? ctx.true_node() : ctx.false_node());
          break;
        case AtomInfo::EqUniv:
          if (pos)
            cc.merge(at.a, at.b);
          else
            cc.add_diseq(at.a, at.b);
          break;
        case AtomInfo::LinEq:
          if (pos) {
            if (!spx.assert_eq(at.lin)) return 0;
            cc.merge(at.a, at.b);
          } else {
            cc.add_diseq(at.a, at.b);
            int_diseqs.push_back({at.a, at.b});
          }
          break;
        case AtomInfo::LinLe:
          if (pos) {
            if (!spx.assert_le(at.lin)) return 0;
          } else {
            LinForm neg = lin_scale(at.lin, Rat(-1));
            neg.k += 1;
            if (!spx.assert_le(neg)) return 0;
          }
          break;
      }
    }
    for (const auto& f : extra)
      if (!spx.assert_le(f)) return 0;

    if (!cc.propagate()) return 0;

    std::set<std::string> eqs_done;
    int probes = cfg.probe_pairs;
    for (int round = 0; round < 8; round++) {
      bool changed = false;
      for (auto [a, b] : cc.int_class_pairs()) {
        LinForm d = lin_sub(ctx.lin_of(a), ctx.lin_of(b));
        if (d.terms.empty()) {
          if (d.k != 0) return 0;
          continue;
        }
        if (!eqs_done.insert(d.key()).second) continue;
        if (!spx.assert_eq(d)) return 0;
        changed = true;
      }
      if (!spx.check()) return 0;
      if (spx.out_of_budget()) {
        reason = "budget";
        return -1;
      }
      // Model-guided equality probing, including constant forms so that a
      // pinned variable meets its literal in one class.
      std::vector<std::pair<Rat, int>> cand;
      for (int n : spx.atom_vars()) cand.push_back({spx.value(n), n});
      for (size_t n = 0; n < ctx.nodes.size(); n++)
        if (ctx.nodes[n].kind == NodeKind::Lin && ctx.nodes[n].lin.terms.empty())
          cand.push_back({ctx.nodes[n].lin.k, (int)n});
      std::sort(cand.begin(), cand.end());
      for (size_t i = 0; i + 1 < cand.size() && probes > 0;) {
        size_t j = i + 1;
        while (j < cand.size() && cand[j].first == cand[i].first && probes > 0) {
          int a = cand[i].second, b = cand[j].second;
          if (!cc.same(a, b)) {
            probes--;
            LinForm d = lin_sub(ctx.lin_of(a), ctx.lin_of(b));
            if (spx.entails_zero(d)) {
              cc.merge(a, b);
              changed = true;
            }
          }
          j++;
        }
        i = j;
      }
      if (changed && !cc.propagate()) return 0;
      for (auto [a, b] : int_diseqs) {
        if (cc.same(a, b)) return 0;
        LinForm d = lin_sub(ctx.lin_of(a), ctx.lin_of(b));
        if (spx.entails_zero(d)) return 0;
      }
      if (spx.out_of_budget()) {
        reason = "budget";
        return -1;
      }
      if (!changed) break;
    }
    if (!cc.acyclic()) return 0;
    if (!complete) return 1;

    int nodes_budget = cfg.bb_nodes;
    int r = spx.integerize(cfg.bb_depth, &nodes_budget);
    if (r == 0) return 0;
    if (r == -1) {
      reason = spx.out_of_budget() ? "budget" : "int-incomplete";
      return -1;
    }
    // Integer model in hand; force apart any disequality the model ignores.
    for (auto [a, b] : int_diseqs) {
      LinForm d = lin_sub(ctx.lin_of(a), ctx.lin_of(b));
      if (eval_lin(d, spx) != 0) continue;
      if (depth <= 0) {
        reason = "int-incomplete";
        return -1;
      }
      auto lo = extra;
      LinForm d1 = d;
      d1.k += 1;  // d <= -1
      lo.push_back(d1);
      int r1 = attempt(lo, depth - 1, complete);
      if (r1 == 1) return 1;
      auto hi = extra;
      LinForm d2 = lin_scale(d, Rat(-1));
      d2.k += 1;  // d >= 1
      hi.push_back(d2);
      int r2 = attempt(hi, depth - 1, complete);
      if (r2 == 1) return 1;
      if (r1 == -1 || r2 == -1) {
        if (reason.empty()) reason = "int-incomplete";
        return -1;
      }
      return 0;
    }
    build_model(cc, spx);
    return 1;
  }

  Term node_to_term(int n) {
    const solver::Node& nd = ctx.nodes[n];
    switch (nd.kind) {
      case NodeKind::True:
        return mk_bool(true);
      case NodeKind::False:
        return mk_bool(false);
      case NodeKind::Var:
        return mk_var(nd.name, nd.sort);
      case NodeKind::Con: {
        std::vector<Term> args;
        for (int a : nd.args) args.push_back(node_to_term(a));
        return mk_con(nd.name, std::move(args));
      }
      case NodeKind::Fun: {
        std::vector<Term> args;
        for (int a : nd.args) args.push_back(node_to_term(a));
        return mk_fun(nd.name, std::move(args), nd.sort);
      }
      case NodeKind::ULam:
        return mk_ulam(nd.binder, node_to_term(nd.args[0]),
                       nd.sort.fun_arg());
      case NodeKind::UApp:
        return mk_uapp(node_to_term(nd.args[0]), node_to_term(nd.args[1]));
      case NodeKind::Lin: {
        if (nd.lin.terms.empty()) return mk_int(numerator(nd.lin.k));
        Term t;
        for (const auto& [a, c] : nd.lin.terms) {
          Term piece = node_to_term(a);
          if (c != 1)
            piece = mk_binop(BinOpKind::Mul, mk_int(numerator(c)), piece);
          t = t.valid() ? mk_binop(BinOpKind::Add, t, piece) : piece;
        }
        if (nd.lin.k != 0)
          t = mk_binop(BinOpKind::Add, t, mk_int(numerator(nd.lin.k)));
        return t;
      }
    }
    throw SolverError("unreachable node kind");
  }

  void build_model(CC& cc, Simplex& spx) {
    model.values.clear();
    std::unordered_map<int, Term> tokens;
    int tok_n = 0;
    std::unordered_set<int> visiting;

    std::function<Term(int)> value_of = [&](int n) -> Term {
      Sort s = ctx.nodes[n].sort;
      int rep = cc.find(n);
      if (s.is_int()) {
        for (int m : cc.members(rep)) {
          const solver::Node& nd = ctx.nodes[m];
          if (nd.kind == NodeKind::Lin && nd.lin.terms.empty())
            return mk_int(numerator(nd.lin.k));
        }
        Rat v = spx.value(n);
        if (denominator(v) != 1) v = Rat(rat_floor(v));
        return mk_int(numerator(v));
      }
      if (s.is_bool()) {
        if (cc.same(n, ctx.true_node())) return mk_bool(true);
        if (cc.same(n, ctx.false_node())) return mk_bool(false);
        return mk_bool(false);
      }
      auto token = [&]() {
        auto it = tokens.find(rep);
        if (it != tokens.end()) return it->second;
        Term t = mk_var("%tok" + std::to_string(tok_n++), s);
        tokens.emplace(rep, t);
        return t;
      };
      if (visiting.count(rep)) return token();
      if (s.is_univ()) {
        int cm = cc.con_member(rep);
        if (cm < 0) return token();
        visiting.insert(rep);
        std::vector<Term> args;
        for (int a : ctx.nodes[cm].args) args.push_back(value_of(a));
        visiting.erase(rep);
        return mk_con(ctx.nodes[cm].name, std::move(args));
      }
      // Fun sort: a lambda member if we have one, a token otherwise.
      for (int m : cc.members(rep))
        if (ctx.nodes[m].kind == NodeKind::ULam) return node_to_term(m);
      return token();
    };

    for (const auto& [name, node] : user_vars)
      model.values.emplace(name, value_of(node));
  }
};

VcListener g_vc_listener;

SatStatus check_sat_impl(const DefEnv& env, const std::vector<Term>& assertions,
                         const SmtConfig& cfg) {
  int64_t budget = cfg.budget;
  Context ctx(env);
  Translator tr(ctx);

  std::vector<PExpr> roots;
  for (const auto& a : assertions) {
    if (!a.sort().is_bool()) throw SolverError("assertion is not boolean");
    roots.push_back(tr.translate(tr.lift(a, 0)));
  }
  for (size_t i = 0; i < tr.sides.size(); i++)
    roots.push_back(tr.translate(tr.sides[i]));

  Cnf cnf;
  cnf.nvars = (int)tr.atoms.size();
  for (const auto& r : roots) cnf.add_root(r);
  if (cnf.root_false) return {SatStatus::Unsat, std::nullopt, ""};

  SatCore core(cnf.nvars, std::move(cnf.clauses));
  std::string taint;
  std::vector<int8_t> last_atoms;
  bool last_ok = false;

  auto give_up = [&]() -> SatStatus {
    return taint.empty() ? SatStatus{SatStatus::Unsat, std::nullopt, ""}
                         : SatStatus{SatStatus::Unknown, std::nullopt, taint};
  };

  std::vector<int8_t> av(tr.atoms.size(), 0);
  while (true) {
    if (--budget <= 0) return {SatStatus::Unknown, std::nullopt, "budget"};
    if (!core.propagate()) {
      if (!core.backtrack()) return give_up();
      continue;
    }
    for (size_t i = 0; i < tr.atoms.size(); i++) av[i] = core.val[i + 1];
    int unassigned = core.pick_unassigned();

    if (unassigned == 0) {
      TheoryCheck check{ctx, tr.atoms, av, cfg, &budget, tr.user_vars, {}, {}};
      int r = check.attempt({}, 16, true);
      if (r == 1) return {SatStatus::Sat, std::move(check.model), ""};
      if (r == -1 && taint.empty()) taint = check.reason;
      last_ok = false;
      if (!core.backtrack()) return give_up();
      continue;
    }
    // Partial assignment: run a cheap rational/CC consistency check before
    // deciding further (skipped when the atom picture hasn't changed).
    if (!(last_ok && av == last_atoms)) {
      TheoryCheck check{ctx, tr.atoms, av, cfg, &budget, tr.user_vars, {}, {}};
      int r = check.attempt({}, 16, false);
      if (r == 0) {
        last_ok = false;
        if (!core.backtrack()) return give_up();
        continue;
      }
      last_ok = r == 1;
      last_atoms = av;
    }
    core.assign(unassigned, true);
  }
}

SmtResult valid_core(const DefEnv& env, const std::vector<Term>& hyps,
                     const Term& goal, const SmtConfig& cfg) {
  std::vector<Term> as(hyps);
  as.push_back(mk_not(goal));
  SatStatus s = check_sat(env, as, cfg);
  switch (s.kind) {
    case SatStatus::Unsat:
      return {SmtVerdict::Valid, std::nullopt, ""};
    case SatStatus::Sat:
      return {SmtVerdict::Invalid, std::move(s.model), ""};
    default:
      return {SmtVerdict::Unknown, std::nullopt, s.reason};
  }
}

}  // namespace

SatStatus check_sat(const DefEnv& env, const std::vector<Term>& assertions,
                    const SmtConfig& cfg) {
  return check_sat_impl(env, assertions, cfg);
}

SmtResult is_valid(const DefEnv& env, const LogicalEnv& hyps, const Term& goal,
                   const SmtConfig& cfg) {
  return valid_core(env, hyps.items(), goal, cfg);
}

bool cc_decide(const DefEnv& env,
               const std::vector<std::pair<Term, Term>>& eqs, const Term& lhs,
               const Term& rhs) {
  Context ctx(env);
  Translator tr(ctx);
  CC cc(ctx);
  int nl = tr.node_of(lhs), nr = tr.node_of(rhs);
  for (const auto& [a, b] : eqs) cc.merge(tr.node_of(a), tr.node_of(b));
  if (!cc.propagate()) return true;  // inconsistent premises entail anything
  return cc.same(nl, nr);
}

SmtResult external_is_valid(const DefEnv& env, const std::vector<Term>& hyps,
                            const Term& goal, const std::string& command) {
  std::string script = emit_smtlib(env, hyps, goal);

  std::vector<std::string> parts;
  std::istringstream cs(command);
  for (std::string w; cs >> w;) parts.push_back(w);
  if (parts.empty()) throw SolverError("empty external solver command");

  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw SolverError("pipe failed for external solver");
  pid_t pid = fork();
  if (pid < 0) throw SolverError("fork failed for external solver");
  if (pid == 0) {
    dup2(to_child[0], 0);
    dup2(from_child[1], 1);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> argv;
    for (auto& p : parts) argv.push_back(p.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  signal(SIGPIPE, SIG_IGN);
  size_t off = 0;
  while (off < script.size()) {
    ssize_t w = write(to_child[1], script.data() + off, script.size() - off);
    if (w <= 0) break;
    off += (size_t)w;
  }
  close(to_child[1]);
  std::string out;
  char buf[4096];
  ssize_t r;
  while ((r = read(from_child[0], buf, sizeof buf)) > 0) out.append(buf, r);
  close(from_child[0]);
  int status = 0;
  waitpid(pid, &status, 0);

  std::istringstream os(out);
  for (std::string tok; os >> tok;) {
    if (tok == "unsat") return {SmtVerdict::Valid, std::nullopt, ""};
    if (tok == "sat") return {SmtVerdict::Invalid, std::nullopt, ""};
    if (tok == "unknown") return {SmtVerdict::Unknown, std::nullopt, "external"};
  }
  throw SolverError("external solver '" + command + "' gave no answer" +
                    (out.empty() ? "" : ": " + out.substr(0, 120)));
}

Solver::Solver(const DefEnv& env, SmtConfig cfg, SolverBackend backend)
    : env_(env), cfg_(cfg), backend_(std::move(backend)) {}

void Solver::push() { frames_.push_back(stack_.size()); }

void Solver::pop() {
  stack_.resize(frames_.back());
  frames_.pop_back();
}

void Solver::assert_term(const Term& t) { stack_.push_back(t); }

void Solver::assert_all(const LogicalEnv& env) {
  for (const auto& t : env.items()) stack_.push_back(t);
}

SmtResult Solver::check_valid(const Term& goal) {
  if (g_vc_listener) g_vc_listener(stack_, goal);
  checks_++;
  SmtResult r = backend_.kind == SolverBackend::External
                    ? external_is_valid(env_, stack_, goal, backend_.command)
                    : valid_core(env_, stack_, goal, cfg_);
  if (r.verdict == SmtVerdict::Unknown) unknowns_++;
  return r;
}

void set_vc_listener(VcListener l) { g_vc_listener = std::move(l); }

}  // namespace ple
