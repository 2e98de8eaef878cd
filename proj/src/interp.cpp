#include "ple/interp.hpp"

#include <algorithm>
#include <cmath>

#include "ple/errors.hpp"
#include "ple/smt.hpp"

namespace ple::interp {

Value Value::of_int(Int v) {
  Value r;
  r.kind = Kind::Int;
  r.i = std::move(v);
  return r;
}

Value Value::of_bool(bool v) {
  Value r;
  r.kind = Kind::Bool;
  r.b = v;
  return r;
}

Value Value::of_con(std::string c, std::vector<Value> fs) {
  Value r;
  r.kind = Kind::Con;
  r.con = std::move(c);
  r.fields = std::move(fs);
  return r;
}

Value Value::of_fun(std::shared_ptr<const Closure> c) {
  Value r;
  r.kind = Kind::Fun;
  r.fun = std::move(c);
  return r;
}

bool value_eq(const Value& a, const Value& b) {
  if (a.kind != b.kind) throw EvalError("comparing values of different kinds");
  switch (a.kind) {
    case Value::Kind::Int:
      return a.i == b.i;
    case Value::Kind::Bool:
      return a.b == b.b;
    case Value::Kind::Con: {
      if (a.con != b.con) return false;
      if (a.fields.size() != b.fields.size()) return false;
      for (size_t i = 0; i < a.fields.size(); i++)
        if (!value_eq(a.fields[i], b.fields[i])) return false;
      return true;
    }
    case Value::Kind::Fun:
      throw EvalError("cannot compare function values");
  }
  return false;
}

std::string value_str(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int:
      return v.i.str();
    case Value::Kind::Bool:
      return v.b ? "True" : "False";
    case Value::Kind::Con: {
      if (v.fields.empty()) return v.con;
      std::string s = "(" + v.con;
      for (const Value& f : v.fields) s += " " + value_str(f);
      return s + ")";
    }
    case Value::Kind::Fun:
      return "<fun>";
  }
  return "?";
}

namespace {

Int as_int(const Value& v, const char* ctx) {
  if (!v.is_int()) throw EvalError(std::string("expected an Int in ") + ctx);
  return v.i;
}

bool as_bool(const Value& v, const char* ctx) {
  if (!v.is_bool()) throw EvalError(std::string("expected a Bool in ") + ctx);
  return v.b;
}

// Non-short-circuit operators over finished values.
Value apply_binop(BinOpKind op, const Value& a, const Value& b) {
  switch (op) {
    case BinOpKind::Eq:
      return Value::of_bool(value_eq(a, b));
    case BinOpKind::Ne:
      return Value::of_bool(!value_eq(a, b));
    case BinOpKind::Lt:
      return Value::of_bool(as_int(a, "<") < as_int(b, "<"));
    case BinOpKind::Le:
      return Value::of_bool(as_int(a, "<=") <= as_int(b, "<="));
    case BinOpKind::Gt:
      return Value::of_bool(as_int(a, ">") > as_int(b, ">"));
    case BinOpKind::Ge:
      return Value::of_bool(as_int(a, ">=") >= as_int(b, ">="));
    case BinOpKind::Add:
      return Value::of_int(as_int(a, "+") + as_int(b, "+"));
    case BinOpKind::Sub:
      return Value::of_int(as_int(a, "-") - as_int(b, "-"));
    case BinOpKind::Mul:
      return Value::of_int(as_int(a, "*") * as_int(b, "*"));
    case BinOpKind::And:
    case BinOpKind::Or:
    case BinOpKind::Imp:
      break;  // handled with short-circuit by the callers
  }
  throw EvalError("unexpected operator in apply_binop");
}

// One interpreter for both levels so function values flow freely between
// them (a sampled term closure may be applied while evaluating a surface
// body and vice versa).
struct Interp {
  const surface::Program* prog;
  const DefEnv* env;
  int64_t fuel;
  int depth = 0;

  // Keeps runaway recursion from overflowing the C++ stack before fuel
  // runs out; divergence must surface as EvalError, not a crash.
  static constexpr int kMaxDepth = 5000;

  struct DepthGuard {
    Interp& in;
    explicit DepthGuard(Interp& i) : in(i) {
      if (++in.depth > kMaxDepth) {
        --in.depth;
        throw EvalError(
            "evaluation recursion too deep (non-terminating definition?)");
      }
    }
    ~DepthGuard() { --in.depth; }
  };

  void spend() {
    if (--fuel < 0)
      throw EvalError(
          "fuel exhausted during evaluation (non-terminating definition?)");
  }

  Value apply(const Value& f, Value arg) {
    if (!f.is_fun()) throw EvalError("application of a non-function value");
    const Closure& c = *f.fun;
    Store inner = c.env;
    inner[c.param] = std::move(arg);
    if (c.ebody) {
      if (!prog) throw EvalError("surface closure without surface context");
      return eval_e(c.ebody, inner);
    }
    return eval_t(c.tbody, inner);
  }

  // ---- surface expressions ----
  Value eval_e(const surface::ExprPtr& ep, const Store& st) {
    DepthGuard dg(*this);
    spend();
    const surface::Expr& e = *ep;
    switch (e.kind) {
      case surface::ExprKind::IntLit:
        return Value::of_int(e.ival);
      case surface::ExprKind::BoolLit:
        return Value::of_bool(e.bval);
      case surface::ExprKind::Var: {
        auto it = st.find(e.name);
        if (it == st.end())
          throw EvalError("unbound variable '" + e.name + "'");
        return it->second;
      }
      case surface::ExprKind::Con: {
        std::vector<Value> fs;
        fs.reserve(e.args.size());
        for (const surface::ExprPtr& a : e.args) fs.push_back(eval_e(a, st));
        return Value::of_con(e.name, std::move(fs));
      }
      case surface::ExprKind::App: {
        if (e.def_call) {
          const surface::ReflectDef* d = nullptr;
          if (prog)
            for (const surface::ReflectDef& cand : prog->defs)
              if (cand.name == e.args[0]->name) d = &cand;
          if (!d)
            throw EvalError("unknown definition '" + e.args[0]->name + "'");
          Store callee;
          for (size_t i = 1; i < e.args.size(); i++)
            callee.emplace(d->params[i - 1].first, eval_e(e.args[i], st));
          return eval_e(d->body, callee);
        }
        Value f = eval_e(e.args[0], st);
        for (size_t i = 1; i < e.args.size(); i++)
          f = apply(f, eval_e(e.args[i], st));
        return f;
      }
      case surface::ExprKind::Lam: {
        auto c = std::make_shared<Closure>();
        c->param = e.name;
        c->ebody = e.args[0];
        c->env = st;
        return Value::of_fun(std::move(c));
      }
      case surface::ExprKind::Ite:
        return as_bool(eval_e(e.args[0], st), "if condition")
                   ? eval_e(e.args[1], st)
                   : eval_e(e.args[2], st);
      case surface::ExprKind::Case: {
        Value v = eval_e(e.args[0], st);
        if (!v.is_con())
          throw EvalError("case scrutinee is not a constructor value");
        for (const surface::CaseAlt& alt : e.alts) {
          if (!alt.wildcard && alt.con != v.con) continue;
          Store inner = st;
          for (size_t j = 0; j < alt.binders.size(); j++)
            inner[alt.binders[j]] = v.fields[j];
          return eval_e(alt.body, inner);
        }
        throw EvalError("no case alternative matched " + value_str(v));
      }
      case surface::ExprKind::BinOp: {
        if (e.bop == BinOpKind::And)
          return as_bool(eval_e(e.args[0], st), "&&")
                     ? eval_e(e.args[1], st)
                     : Value::of_bool(false);
        if (e.bop == BinOpKind::Or)
          return as_bool(eval_e(e.args[0], st), "||")
                     ? Value::of_bool(true)
                     : eval_e(e.args[1], st);
        if (e.bop == BinOpKind::Imp)
          return as_bool(eval_e(e.args[0], st), "=>")
                     ? eval_e(e.args[1], st)
                     : Value::of_bool(true);
        Value a = eval_e(e.args[0], st);
        Value b = eval_e(e.args[1], st);
        return apply_binop(e.bop, a, b);
      }
      case surface::ExprKind::UnOp:
        return Value::of_bool(!as_bool(eval_e(e.args[0], st), "not"));
    }
    throw EvalError("unreachable surface expression kind");
  }

  // ---- logic terms ----
  Value eval_t(const Term& t, const Store& st) {
    DepthGuard dg(*this);
    spend();
    switch (t.kind()) {
      case TermKind::IntLit:
        return Value::of_int(t.n().ival);
      case TermKind::BoolLit:
        return Value::of_bool(t.n().bval);
      case TermKind::Var: {
        auto it = st.find(t.n().name);
        if (it == st.end())
          throw EvalError("unbound variable '" + t.n().name + "'");
        return it->second;
      }
      case TermKind::ConApp: {
        std::vector<Value> fs;
        fs.reserve(t.args().size());
        for (const Term& a : t.args()) fs.push_back(eval_t(a, st));
        return Value::of_con(t.n().name, std::move(fs));
      }
      case TermKind::FunApp:
        return eval_funapp(t, st);
      case TermKind::BinOp: {
        BinOpKind op = t.n().bop;
        if (op == BinOpKind::And)
          return as_bool(eval_t(t.args()[0], st), "&&")
                     ? eval_t(t.args()[1], st)
                     : Value::of_bool(false);
        if (op == BinOpKind::Or)
          return as_bool(eval_t(t.args()[0], st), "||")
                     ? Value::of_bool(true)
                     : eval_t(t.args()[1], st);
        if (op == BinOpKind::Imp)
          return as_bool(eval_t(t.args()[0], st), "=>")
                     ? eval_t(t.args()[1], st)
                     : Value::of_bool(true);
        Value a = eval_t(t.args()[0], st);
        Value b = eval_t(t.args()[1], st);
        return apply_binop(op, a, b);
      }
      case TermKind::UnOp:
        return Value::of_bool(!as_bool(eval_t(t.args()[0], st), "not"));
      case TermKind::Ite:
        return as_bool(eval_t(t.args()[0], st), "ite condition")
                   ? eval_t(t.args()[1], st)
                   : eval_t(t.args()[2], st);
      case TermKind::ULam: {
        auto c = std::make_shared<Closure>();
        c->param = pool_var(t.sort().fun_arg(), t.n().binder).n().name;
        c->tbody = t.args()[0];
        c->env = st;
        return Value::of_fun(std::move(c));
      }
      case TermKind::UApp:
        return apply(eval_t(t.args()[0], st), eval_t(t.args()[1], st));
    }
    throw EvalError("unreachable term kind");
  }

  Value eval_funapp(const Term& t, const Store& st) {
    if (!env) throw EvalError("term evaluation without a definition env");
    const std::string& name = t.n().name;
    if (const Constructor* c = env->checker_of(name)) {
      Value v = eval_t(t.args()[0], st);
      if (!v.is_con())
        throw EvalError("checker '" + name + "' on a non-constructor value");
      return Value::of_bool(v.con == c->name);
    }
    if (auto sel = env->selector_of(name)) {
      Value v = eval_t(t.args()[0], st);
      if (!v.is_con())
        throw EvalError("selector '" + name + "' on a non-constructor value");
      if (v.con != sel->first->name)
        throw EvalError("selector '" + name + "' applied to " + value_str(v));
      return v.fields[sel->second];
    }
    if (const GuardedDef* d = env->find(name)) {
      Store callee;
      for (size_t i = 0; i < t.args().size(); i++)
        callee.emplace(d->params[i].first, eval_t(t.args()[i], st));
      for (const Branch& b : d->branches)
        if (as_bool(eval_t(b.guard, callee), "a branch guard"))
          return eval_t(b.body, callee);
      throw EvalError("no branch matched in '" + name + "'");
    }
    throw EvalError("uninterpreted symbol '" + name + "'");
  }
};

// ---- random values ---------------------------------------------------------

Int zipf_int(std::mt19937_64& rng, int attempt) {
  // Magnitudes biased toward small values; the range widens with attempts.
  long range = 100 * (1 + attempt / 64);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = uni(rng);
  long mag = (long)(std::pow((double)range + 1.0, u)) - 1;
  if (rng() & 1) mag = -mag;
  return Int(mag);
}

Value random_con(const DefEnv& env, const std::string& datatype,
                 std::mt19937_64& rng, int attempt, int size) {
  const Datatype* dt = env.find_datatype(datatype);
  if (!dt) throw EvalError("cannot sample unknown datatype '" + datatype + "'");
  std::vector<const Constructor*> leaves, nodes;
  for (const std::string& cn : dt->constructors) {
    const Constructor* c = env.find_constructor(cn);
    bool rec = false;
    for (const ConstructorField& f : c->fields)
      if (f.sort.is_univ()) rec = true;
    (rec ? nodes : leaves).push_back(c);
  }
  const Constructor* pick = nullptr;
  if (size <= 1 || nodes.empty()) {
    if (leaves.empty())
      throw EvalError("datatype '" + datatype + "' has no base constructor");
    pick = leaves[rng() % leaves.size()];
  } else if (!leaves.empty() && (rng() & 1)) {
    pick = leaves[rng() % leaves.size()];
  } else {
    pick = nodes[rng() % nodes.size()];
  }
  std::vector<Value> fs;
  for (const ConstructorField& f : pick->fields) {
    if (f.sort.is_univ())
      fs.push_back(random_con(env, f.datatype, rng, attempt, size - 1));
    else if (f.sort.is_int())
      fs.push_back(Value::of_int(zipf_int(rng, attempt)));
    else if (f.sort.is_bool())
      fs.push_back(Value::of_bool(rng() & 1));
    else
      throw EvalError("cannot sample a function-sorted constructor field");
  }
  return Value::of_con(pick->name, std::move(fs));
}

std::optional<Value> term_to_value(const Term& t) {
  switch (t.kind()) {
    case TermKind::IntLit:
      return Value::of_int(t.n().ival);
    case TermKind::BoolLit:
      return Value::of_bool(t.n().bval);
    case TermKind::ConApp: {
      std::vector<Value> fs;
      for (const Term& a : t.args()) {
        auto v = term_to_value(a);
        if (!v) return std::nullopt;
        fs.push_back(std::move(*v));
      }
      return Value::of_con(t.n().name, std::move(fs));
    }
    default:
      return std::nullopt;  // tokens and anything non-ground
  }
}

bool store_satisfies(const DefEnv& env, const std::vector<Term>& hyps,
                     const Store& st) {
  try {
    for (const Term& h : hyps) {
      Value v = eval_term(env, st, h);
      if (!v.is_bool() || !v.b) return false;
    }
    return true;
  } catch (const EvalError&) {
    return false;
  }
}

}  // namespace

Value eval_expr(const surface::Program& defs, const Store& store,
                const surface::ExprPtr& e, int64_t fuel) {
  Interp in{&defs, nullptr, fuel};
  return in.eval_e(e, store);
}

Value eval_term(const DefEnv& env, const Store& store, const Term& t,
                int64_t fuel) {
  Interp in{nullptr, &env, fuel};
  return in.eval_t(t, store);
}

Value random_value(const DefEnv& env, Sort s, const std::string& datatype,
                   std::mt19937_64& rng, int attempt) {
  if (s.is_int()) return Value::of_int(zipf_int(rng, attempt));
  if (s.is_bool()) return Value::of_bool(rng() & 1);
  if (s.is_univ()) return random_con(env, datatype, rng, attempt, 8);
  if (s.is_fun() && s.fun_arg().is_int() && s.fun_res().is_int()) {
    // Affine closure: lam x. a*x + b.
    Term x = pool_var(Sort::int_(), 1);
    Term body =
        mk_binop(BinOpKind::Add,
                 mk_binop(BinOpKind::Mul, mk_int(zipf_int(rng, attempt)), x),
                 mk_int(zipf_int(rng, attempt)));
    auto c = std::make_shared<Closure>();
    c->param = x.n().name;
    c->tbody = body;
    return Value::of_fun(std::move(c));
  }
  throw EvalError("cannot sample a value of sort " + s.str());
}

std::optional<Store> sample_store(const DefEnv& env,
                                  const std::vector<Term>& hyps,
                                  const std::vector<reflect::FreeVar>& vars,
                                  std::mt19937_64& rng, int budget) {
  // Solver-guided first: concretize the model's unconstrained tokens.
  try {
    SatStatus st = check_sat(env, hyps);
    if (st.kind == SatStatus::Unsat) return std::nullopt;
    if (st.kind == SatStatus::Sat) {
      Store s;
      for (const reflect::FreeVar& v : vars) {
        std::optional<Value> val;
        if (st.model) {
          auto it = st.model->values.find(v.name);
          if (it != st.model->values.end()) val = term_to_value(it->second);
        }
        if (!val) val = random_value(env, v.sort, v.datatype, rng, 0);
        s.emplace(v.name, std::move(*val));
      }
      if (store_satisfies(env, hyps, s)) return s;
    }
  } catch (const Error&) {
    // fall through to random generation
  }

  for (int attempt = 0; attempt < budget; attempt++) {
    try {
      Store s;
      for (const reflect::FreeVar& v : vars)
        s.emplace(v.name, random_value(env, v.sort, v.datatype, rng, attempt));
      if (store_satisfies(env, hyps, s)) return s;
    } catch (const EvalError&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace ple::interp
