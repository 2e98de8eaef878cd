#include "ple/terms.hpp"

#include <algorithm>
#include <sstream>

namespace ple {

bool binop_is_cmp(BinOpKind k) {
  switch (k) {
    case BinOpKind::Eq: case BinOpKind::Ne: case BinOpKind::Lt:
    case BinOpKind::Le: case BinOpKind::Gt: case BinOpKind::Ge:
      return true;
    default:
      return false;
  }
}

bool binop_is_bool(BinOpKind k) {
  return k == BinOpKind::And || k == BinOpKind::Or || k == BinOpKind::Imp;
}

bool binop_is_arith(BinOpKind k) {
  return k == BinOpKind::Add || k == BinOpKind::Sub || k == BinOpKind::Mul;
}

const char* binop_name(BinOpKind k) {
  switch (k) {
    case BinOpKind::Eq: return "=";
    case BinOpKind::Ne: return "/=";
    case BinOpKind::Lt: return "<";
    case BinOpKind::Le: return "<=";
    case BinOpKind::Gt: return ">";
    case BinOpKind::Ge: return ">=";
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::And: return "&&";
    case BinOpKind::Or: return "||";
    case BinOpKind::Imp: return "==>";
  }
  return "?";
}

namespace {

size_t mix(size_t h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

Term finish(std::shared_ptr<TermNode> n) {
  size_t h = mix((size_t)n->kind, n->sort.valid() ? n->sort.hash() : 0);
  switch (n->kind) {
    case TermKind::IntLit: h = mix(h, std::hash<std::string>()(n->ival.str())); break;
    case TermKind::BoolLit: h = mix(h, n->bval ? 2 : 1); break;
    case TermKind::Var:
    case TermKind::ConApp:
    case TermKind::FunApp: h = mix(h, std::hash<std::string>()(n->name)); break;
    case TermKind::BinOp: h = mix(h, 100 + (size_t)n->bop); break;
    case TermKind::UnOp: h = mix(h, 200 + (size_t)n->uop); break;
    case TermKind::Ite: h = mix(h, 300); break;
    case TermKind::ULam: h = mix(h, 400 + (size_t)n->binder); break;
    case TermKind::UApp: h = mix(h, 500); break;
  }
  for (const Term& a : n->args) h = mix(h, a.hash());
  n->hash = h;
  return Term(std::shared_ptr<const TermNode>(std::move(n)));
}

bool node_eq(const TermNode& a, const TermNode& b) {
  if (a.kind != b.kind || a.hash != b.hash) return false;
  if (!(a.sort == b.sort)) return false;
  switch (a.kind) {
    case TermKind::IntLit: if (a.ival != b.ival) return false; break;
    case TermKind::BoolLit: if (a.bval != b.bval) return false; break;
    case TermKind::Var:
    case TermKind::ConApp:
    case TermKind::FunApp: if (a.name != b.name) return false; break;
    case TermKind::BinOp: if (a.bop != b.bop) return false; break;
    case TermKind::UnOp: if (a.uop != b.uop) return false; break;
    case TermKind::Ite: break;
    case TermKind::ULam: if (a.binder != b.binder) return false; break;
    case TermKind::UApp: break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); i++)
    if (a.args[i] != b.args[i]) return false;
  return true;
}

[[noreturn]] void sort_fail(const std::string& what) { throw SortError(what); }

void need(bool ok, const std::string& what) {
  if (!ok) sort_fail(what);
}

}  // namespace

bool Term::operator==(const Term& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  return node_eq(*node_, *o.node_);
}

Term mk_int(const Int& v) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::IntLit;
  n->sort = Sort::int_();
  n->ival = v;
  return finish(std::move(n));
}

Term mk_bool(bool v) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::BoolLit;
  n->sort = Sort::bool_();
  n->bval = v;
  return finish(std::move(n));
}

Term mk_var(const std::string& name, Sort s) {
  need(s.valid(), "variable '" + name + "' with no sort");
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Var;
  n->sort = s;
  n->name = name;
  return finish(std::move(n));
}

Term mk_con(const std::string& con, std::vector<Term> args) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::ConApp;
  n->sort = Sort::univ();
  n->name = con;
  n->args = std::move(args);
  return finish(std::move(n));
}

Term mk_fun(const std::string& fn, std::vector<Term> args, Sort ret) {
  need(ret.valid(), "application of '" + fn + "' with no result sort");
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::FunApp;
  n->sort = ret;
  n->name = fn;
  n->args = std::move(args);
  return finish(std::move(n));
}

Term mk_binop(BinOpKind op, Term a, Term b) {
  need(a.valid() && b.valid(), "binop with missing operand");
  Sort s;
  if (binop_is_arith(op)) {
    need(a.sort().is_int() && b.sort().is_int(),
         std::string(binop_name(op)) + " needs Int operands, got " +
             a.sort().str() + " and " + b.sort().str());
    s = Sort::int_();
  } else if (binop_is_bool(op)) {
    need(a.sort().is_bool() && b.sort().is_bool(),
         std::string(binop_name(op)) + " needs Bool operands, got " +
             a.sort().str() + " and " + b.sort().str());
    s = Sort::bool_();
  } else if (op == BinOpKind::Eq || op == BinOpKind::Ne) {
    need(a.sort() == b.sort(), "=/-= over mismatched sorts " + a.sort().str() +
                                   " and " + b.sort().str());
    s = Sort::bool_();
  } else {  // order comparisons
    need(a.sort().is_int() && b.sort().is_int(),
         std::string(binop_name(op)) + " needs Int operands, got " +
             a.sort().str() + " and " + b.sort().str());
    s = Sort::bool_();
  }
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::BinOp;
  n->sort = s;
  n->bop = op;
  n->args = {std::move(a), std::move(b)};
  return finish(std::move(n));
}

Term mk_not(Term a) {
  need(a.valid() && a.sort().is_bool(), "not needs a Bool operand");
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::UnOp;
  n->sort = Sort::bool_();
  n->uop = UnOpKind::Not;
  n->args = {std::move(a)};
  return finish(std::move(n));
}

Term mk_ite(Term c, Term t, Term e) {
  need(c.valid() && c.sort().is_bool(), "ite condition must be Bool");
  need(t.sort() == e.sort(), "ite branches have mismatched sorts " +
                                 t.sort().str() + " and " + e.sort().str());
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Ite;
  n->sort = t.sort();
  n->args = {std::move(c), std::move(t), std::move(e)};
  return finish(std::move(n));
}

Term mk_ulam(int binder, Term body, Sort argsort) {
  need(binder >= 1, "lambda binder index must be positive");
  // Pool invariant: the binder index is strictly greater than every lambda
  // index occurring inside the body. References to enclosing binders (which
  // carry larger indices) are allowed.
  need(lambda_index_ok(body, binder),
       "lambda binder index " + std::to_string(binder) +
           " not above body's lambda indices");
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::ULam;
  n->sort = Sort::fun(argsort, body.sort());
  n->binder = binder;
  n->args = {std::move(body)};
  return finish(std::move(n));
}

Term mk_uapp(Term f, Term a) {
  need(f.sort().is_fun(), "app of non-function sort " + f.sort().str());
  need(f.sort().fun_arg() == a.sort(),
       "app argument sort " + a.sort().str() + " does not match " +
           f.sort().str());
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::UApp;
  n->sort = f.sort().fun_res();
  n->args = {std::move(f), std::move(a)};
  return finish(std::move(n));
}

Term mk_and(Term a, Term b) { return mk_binop(BinOpKind::And, a, b); }
Term mk_eq(Term a, Term b) { return mk_binop(BinOpKind::Eq, a, b); }

Term mk_conj(const std::vector<Term>& ts) {
  if (ts.empty()) return mk_bool(true);
  Term acc = ts[0];
  for (size_t i = 1; i < ts.size(); i++) acc = mk_and(acc, ts[i]);
  return acc;
}

Term pool_var(Sort s, int index) {
  return mk_var("%" + std::to_string(index) + "@" + s.str(), s);
}

std::optional<int> pool_var_index(const Term& t) {
  if (!t.valid() || t.kind() != TermKind::Var) return std::nullopt;
  const std::string& nm = t.n().name;
  if (nm.empty() || nm[0] != '%') return std::nullopt;
  size_t at = nm.find('@');
  if (at == std::string::npos) return std::nullopt;
  return std::stoi(nm.substr(1, at - 1));
}

bool is_pool_var(const Term& t) { return pool_var_index(t).has_value(); }

bool lambda_index_ok(const Term& t, int binder) {
  if (!t.valid()) return true;
  if (t.kind() == TermKind::ULam && t.n().binder >= binder) return false;
  for (const Term& a : t.args())
    if (!lambda_index_ok(a, binder)) return false;
  return true;
}

int max_lambda_index(const Term& t) {
  if (!t.valid()) return 0;
  int m = 0;
  if (t.kind() == TermKind::ULam) m = t.n().binder;
  if (auto i = pool_var_index(t)) m = std::max(m, *i);
  for (const Term& a : t.args()) m = std::max(m, max_lambda_index(a));
  return m;
}

int max_ulam_binder(const Term& t) {
  if (!t.valid()) return 0;
  int m = t.kind() == TermKind::ULam ? t.n().binder : 0;
  for (const Term& a : t.args()) m = std::max(m, max_ulam_binder(a));
  return m;
}

bool contains_ulam(const Term& t) {
  if (t.kind() == TermKind::ULam) return true;
  for (const Term& a : t.args())
    if (contains_ulam(a)) return true;
  return false;
}

int term_compare(const Term& a, const Term& b) {
  if (a == b) return 0;
  if ((int)a.kind() != (int)b.kind()) return (int)a.kind() < (int)b.kind() ? -1 : 1;
  const TermNode& x = a.n();
  const TermNode& y = b.n();
  switch (a.kind()) {
    case TermKind::IntLit:
      return x.ival < y.ival ? -1 : (x.ival == y.ival ? 0 : 1);
    case TermKind::BoolLit:
      return x.bval == y.bval ? 0 : (x.bval ? 1 : -1);
    case TermKind::Var:
    case TermKind::ConApp:
    case TermKind::FunApp: {
      int c = x.name.compare(y.name);
      if (c != 0) return c < 0 ? -1 : 1;
      break;
    }
    case TermKind::BinOp:
      if (x.bop != y.bop) return (int)x.bop < (int)y.bop ? -1 : 1;
      break;
    case TermKind::UnOp:
      if (x.uop != y.uop) return (int)x.uop < (int)y.uop ? -1 : 1;
      break;
    case TermKind::ULam:
      if (x.binder != y.binder) return x.binder < y.binder ? -1 : 1;
      break;
    default:
      break;
  }
  if (x.args.size() != y.args.size())
    return x.args.size() < y.args.size() ? -1 : 1;
  for (size_t i = 0; i < x.args.size(); i++) {
    int c = term_compare(x.args[i], y.args[i]);
    if (c != 0) return c;
  }
  {
    std::string sa = a.sort().str(), sb = b.sort().str();
    int c = sa.compare(sb);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

namespace {

void flatten_and(const Term& t, std::vector<Term>& out) {
  if (t.kind() == TermKind::BinOp && t.n().bop == BinOpKind::And) {
    flatten_and(t.args()[0], out);
    flatten_and(t.args()[1], out);
  } else {
    out.push_back(t);
  }
}

Term rebuild(const Term& t, std::vector<Term> args) {
  const TermNode& n = t.n();
  bool same = args.size() == n.args.size();
  if (same)
    for (size_t i = 0; i < args.size(); i++)
      if (args[i] != n.args[i]) { same = false; break; }
  if (same) return t;
  switch (n.kind) {
    case TermKind::ConApp: return mk_con(n.name, std::move(args));
    case TermKind::FunApp: return mk_fun(n.name, std::move(args), n.sort);
    case TermKind::BinOp: return mk_binop(n.bop, args[0], args[1]);
    case TermKind::UnOp: return mk_not(args[0]);
    case TermKind::Ite: return mk_ite(args[0], args[1], args[2]);
    case TermKind::ULam: return mk_ulam(n.binder, args[0], n.sort.fun_arg());
    case TermKind::UApp: return mk_uapp(args[0], args[1]);
    default: return t;
  }
}

}  // namespace

Term normalize(const Term& t) {
  if (!t.valid() || t.args().empty()) return t;
  if (t.kind() == TermKind::BinOp && t.n().bop == BinOpKind::And) {
    std::vector<Term> conj;
    flatten_and(t, conj);
    for (Term& c : conj) c = normalize(c);
    Term acc = conj[0];
    for (size_t i = 1; i < conj.size(); i++) acc = mk_and(acc, conj[i]);
    return acc;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(normalize(a));
  if (t.kind() == TermKind::BinOp &&
      (t.n().bop == BinOpKind::Eq || t.n().bop == BinOpKind::Ne)) {
    if (term_compare(args[0], args[1]) > 0) std::swap(args[0], args[1]);
  }
  return rebuild(t, std::move(args));
}

void DefEnv::add_def(GuardedDef d) {
  if (defs_.count(d.name))
    throw InputError("duplicate definition of '" + d.name + "'");
  def_order_.push_back(d.name);
  defs_.emplace(d.name, std::move(d));
}

const GuardedDef* DefEnv::find(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

void DefEnv::add_datatype(const Datatype& dt,
                          const std::vector<Constructor>& cons) {
  if (datatypes_.count(dt.name))
    throw InputError("duplicate datatype '" + dt.name + "'");
  datatypes_.emplace(dt.name, dt);
  dt_order_.push_back(dt.name);
  for (const Constructor& c : cons) {
    if (constructors_.count(c.name))
      throw InputError("duplicate constructor '" + c.name + "'");
    constructors_.emplace(c.name, c);
    checker_to_con_.emplace(c.checker, c.name);
    for (size_t i = 0; i < c.selectors.size(); i++)
      selector_to_con_.emplace(c.selectors[i], std::make_pair(c.name, (int)i));
  }
}

const Datatype* DefEnv::find_datatype(const std::string& name) const {
  auto it = datatypes_.find(name);
  return it == datatypes_.end() ? nullptr : &it->second;
}

const Constructor* DefEnv::find_constructor(const std::string& name) const {
  auto it = constructors_.find(name);
  return it == constructors_.end() ? nullptr : &it->second;
}

const Constructor* DefEnv::checker_of(const std::string& fn) const {
  auto it = checker_to_con_.find(fn);
  return it == checker_to_con_.end() ? nullptr
                                     : find_constructor(it->second);
}

std::optional<std::pair<const Constructor*, int>> DefEnv::selector_of(
    const std::string& fn) const {
  auto it = selector_to_con_.find(fn);
  if (it == selector_to_con_.end()) return std::nullopt;
  return std::make_pair(find_constructor(it->second.first), it->second.second);
}

bool LogicalEnv::insert(const Term& t) {
  Term key = normalize(t);
  if (keys_.count(key)) return false;
  keys_.insert(key);
  items_.push_back(t);
  return true;
}

bool LogicalEnv::contains(const Term& t) const {
  return keys_.count(normalize(t)) > 0;
}

bool LogicalEnv::subset_of(const LogicalEnv& other) const {
  if (size() > other.size()) return false;
  for (const Term& k : keys_)
    if (!other.keys_.count(k)) return false;
  return true;
}

namespace {

// True when the pool variable %index@argsort occurs free in t (occurrences
// under a ULam that rebinds the same index and sort are shadowed).
bool has_free_pool(const Term& t, int index, const Sort& argsort) {
  if (!t.valid()) return false;
  if (t.kind() == TermKind::ULam && t.n().binder == index &&
      t.sort().fun_arg() == argsort)
    return false;
  if (auto i = pool_var_index(t))
    return *i == index && t.sort() == argsort;
  for (const Term& a : t.args())
    if (has_free_pool(a, index, argsort)) return true;
  return false;
}

Term subst_rec(const Term& t,
               const std::unordered_map<std::string, Term>& subst) {
  switch (t.kind()) {
    case TermKind::IntLit:
    case TermKind::BoolLit:
      return t;
    case TermKind::Var: {
      auto it = subst.find(t.n().name);
      if (it == subst.end()) return t;
      if (!(it->second.sort() == t.sort()))
        throw SortError("substituting '" + t.n().name + "' : " +
                        t.sort().str() + " with a term of sort " +
                        it->second.sort().str());
      return it->second;
    }
    case TermKind::ULam: {
      int binder = t.n().binder;
      Sort argsort = t.sort().fun_arg();
      std::string self = pool_var(argsort, binder).n().name;
      // The binder shadows an identically named outer pool variable.
      std::unordered_map<std::string, Term> inner(subst);
      inner.erase(self);
      if (inner.empty()) return t;
      // Rename the binder only when a replacement would capture it (the
      // exact pool variable occurs free in a value) or would break the
      // index invariant (a value carries a ULam index at or above it).
      bool risky = false;
      int ceiling = std::max(binder, max_lambda_index(t));
      for (const auto& [k, v] : inner) {
        (void)k;
        if (max_ulam_binder(v) >= binder ||
            has_free_pool(v, binder, argsort))
          risky = true;
        ceiling = std::max(ceiling, max_lambda_index(v));
      }
      int b2 = binder;
      Term body = t.args()[0];
      if (risky) {
        b2 = ceiling + 1;
        std::unordered_map<std::string, Term> rename;
        rename.emplace(self, pool_var(argsort, b2));
        body = subst_rec(body, rename);
      }
      body = subst_rec(body, inner);
      // A nested lambda may have renamed itself to or above this binder;
      // lift the binder past everything the new body mentions.
      if (max_ulam_binder(body) >= b2) {
        int b3 = std::max(b2, max_lambda_index(body)) + 1;
        std::unordered_map<std::string, Term> rename;
        rename.emplace(pool_var(argsort, b2).n().name,
                       pool_var(argsort, b3));
        body = subst_rec(body, rename);
        b2 = b3;
      }
      return mk_ulam(b2, std::move(body), argsort);
    }
    default: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      bool changed = false;
      for (const Term& a : t.args()) {
        args.push_back(subst_rec(a, subst));
        changed = changed || args.back() != a;
      }
      if (!changed) return t;
      return rebuild(t, std::move(args));
    }
  }
}

}  // namespace

Term substitute(const Term& t,
                const std::unordered_map<std::string, Term>& subst) {
  if (subst.empty()) return t;
  return subst_rec(t, subst);
}

namespace {

void collect_rec(const Term& t, const DefEnv& env,
                 std::vector<Term>& out,
                 std::unordered_set<Term, TermHash>& seen) {
  if (t.kind() == TermKind::FunApp && env.find(t.n().name)) {
    if (seen.insert(t).second) out.push_back(t);
  }
  for (const Term& a : t.args()) collect_rec(a, env, out, seen);
}

}  // namespace

std::vector<Term> collect_apps(const Term& t, const DefEnv& env) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  collect_rec(t, env, out, seen);
  return out;
}

std::vector<Term> collect_apps(const std::vector<Term>& ts, const DefEnv& env) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  for (const Term& t : ts) collect_rec(t, env, out, seen);
  return out;
}

namespace {

std::optional<Int> int_of(const Term& t) {
  if (t.kind() == TermKind::IntLit) return t.n().ival;
  return std::nullopt;
}

std::optional<bool> bool_of(const Term& t) {
  if (t.kind() == TermKind::BoolLit) return t.n().bval;
  return std::nullopt;
}

}  // namespace

Term fold_ground(const Term& t, const DefEnv& env) {
  if (!t.valid() || t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(fold_ground(a, env));
  Term r = rebuild(t, std::move(args));
  const TermNode& n = r.n();
  switch (n.kind) {
    case TermKind::UnOp:
      if (auto b = bool_of(n.args[0])) return mk_bool(!*b);
      return r;
    case TermKind::Ite:
      if (auto c = bool_of(n.args[0])) return *c ? n.args[1] : n.args[2];
      return r;
    case TermKind::FunApp: {
      if (const Constructor* c = env.checker_of(n.name)) {
        if (n.args[0].kind() == TermKind::ConApp)
          return mk_bool(n.args[0].n().name == c->name);
        return r;
      }
      if (auto sel = env.selector_of(n.name)) {
        const Term& arg = n.args[0];
        if (arg.kind() == TermKind::ConApp &&
            arg.n().name == sel->first->name)
          return arg.args()[sel->second];
        return r;
      }
      return r;
    }
    case TermKind::BinOp: {
      const Term& a = n.args[0];
      const Term& b = n.args[1];
      auto ia = int_of(a), ib = int_of(b);
      auto ba = bool_of(a), bb = bool_of(b);
      switch (n.bop) {
        case BinOpKind::Add: if (ia && ib) return mk_int(*ia + *ib); break;
        case BinOpKind::Sub: if (ia && ib) return mk_int(*ia - *ib); break;
        case BinOpKind::Mul: if (ia && ib) return mk_int(*ia * *ib); break;
        case BinOpKind::Lt: if (ia && ib) return mk_bool(*ia < *ib); break;
        case BinOpKind::Le: if (ia && ib) return mk_bool(*ia <= *ib); break;
        case BinOpKind::Gt: if (ia && ib) return mk_bool(*ia > *ib); break;
        case BinOpKind::Ge: if (ia && ib) return mk_bool(*ia >= *ib); break;
        case BinOpKind::Eq:
          if (ia && ib) return mk_bool(*ia == *ib);
          if (ba && bb) return mk_bool(*ba == *bb);
          if (a.kind() == TermKind::ConApp && b.kind() == TermKind::ConApp &&
              a.n().name != b.n().name)
            return mk_bool(false);
          if (a == b) return mk_bool(true);
          break;
        case BinOpKind::Ne:
          if (ia && ib) return mk_bool(*ia != *ib);
          if (ba && bb) return mk_bool(*ba != *bb);
          if (a.kind() == TermKind::ConApp && b.kind() == TermKind::ConApp &&
              a.n().name != b.n().name)
            return mk_bool(true);
          if (a == b) return mk_bool(false);
          break;
        case BinOpKind::And:
          if (ba) return *ba ? b : mk_bool(false);
          if (bb) return *bb ? a : mk_bool(false);
          break;
        case BinOpKind::Or:
          if (ba) return *ba ? mk_bool(true) : b;
          if (bb) return *bb ? mk_bool(true) : a;
          break;
        case BinOpKind::Imp:
          if (ba) return *ba ? b : mk_bool(true);
          if (bb && *bb) return mk_bool(true);
          break;
      }
      return r;
    }
    default:
      return r;
  }
}

namespace {

void print_rec(const Term& t, std::ostringstream& os) {
  const TermNode& n = t.n();
  switch (n.kind) {
    case TermKind::IntLit: os << n.ival.str(); break;
    case TermKind::BoolLit: os << (n.bval ? "true" : "false"); break;
    case TermKind::Var: os << n.name; break;
    case TermKind::ConApp:
    case TermKind::FunApp:
      os << n.name;
      if (!n.args.empty()) {
        os << "(";
        for (size_t i = 0; i < n.args.size(); i++) {
          if (i) os << ", ";
          print_rec(n.args[i], os);
        }
        os << ")";
      }
      break;
    case TermKind::BinOp:
      os << "(";
      print_rec(n.args[0], os);
      os << " " << binop_name(n.bop) << " ";
      print_rec(n.args[1], os);
      os << ")";
      break;
    case TermKind::UnOp:
      os << "not ";
      print_rec(n.args[0], os);
      break;
    case TermKind::Ite:
      os << "ite(";
      print_rec(n.args[0], os);
      os << ", ";
      print_rec(n.args[1], os);
      os << ", ";
      print_rec(n.args[2], os);
      os << ")";
      break;
    case TermKind::ULam:
      os << "(lam %" << n.binder << "@" << t.sort().fun_arg().str() << ". ";
      print_rec(n.args[0], os);
      os << ")";
      break;
    case TermKind::UApp:
      os << "app(";
      print_rec(n.args[0], os);
      os << ", ";
      print_rec(n.args[1], os);
      os << ")";
      break;
  }
}

}  // namespace

std::string Term::str() const {
  if (!valid()) return "<null>";
  std::ostringstream os;
  print_rec(*this, os);
  return os.str();
}

}  // namespace ple
