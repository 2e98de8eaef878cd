#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "ple/errors.hpp"
#include "ple/smt.hpp"
#include "ple/terms.hpp"

namespace ple {

namespace {

// ---- Emission ---------------------------------------------------------------

std::string mangle_sort(Sort s) {
  switch (s.kind()) {
    case SortKind::Int: return "Int";
    case SortKind::Bool: return "Bool";
    case SortKind::Univ: return "Univ";
    case SortKind::Fun:
      return "Fun_" + mangle_sort(s.fun_arg()) + "_" + mangle_sort(s.fun_res());
  }
  return "?";
}

bool simple_symbol(const std::string& s) {
  if (s.empty() || std::isdigit((unsigned char)s[0])) return false;
  for (char c : s)
    if (!std::isalnum((unsigned char)c) && c != '_') return false;
  return true;
}

std::string sym(const std::string& s) {
  return simple_symbol(s) ? s : "|" + s + "|";
}

struct Collector {
  const DefEnv& env;
  std::map<std::string, Sort> vars;
  std::map<std::string, std::pair<std::vector<Sort>, Sort>> funs;
  std::map<std::string, Sort> fun_sorts;
  bool univ_used = false;

  void sort_of(Sort s) {
    if (s.is_univ()) univ_used = true;
    if (s.is_fun()) {
      fun_sorts.emplace(mangle_sort(s), s);
      sort_of(s.fun_arg());
      sort_of(s.fun_res());
    }
  }

  void walk(const Term& t) {
    sort_of(t.sort());
    switch (t.kind()) {
      case TermKind::Var:
        vars.emplace(t.n().name, t.sort());
        break;
      case TermKind::FunApp: {
        const std::string& f = t.n().name;
        if (!env.checker_of(f) && !env.selector_of(f)) {
          std::vector<Sort> args;
          for (const auto& a : t.args()) args.push_back(a.sort());
          funs.emplace(f, std::make_pair(std::move(args), t.sort()));
        }
        break;
      }
      default:
        break;
    }
    for (const auto& a : t.args()) walk(a);
  }
};

void emit_term(std::ostream& os, const Term& t, const DefEnv& env) {
  switch (t.kind()) {
    case TermKind::IntLit:
      if (t.n().ival < 0)
        os << "(- " << -t.n().ival << ")";
      else
        os << t.n().ival;
      return;
    case TermKind::BoolLit:
      os << (t.n().bval ? "true" : "false");
      return;
    case TermKind::Var:
      os << sym(t.n().name);
      return;
    case TermKind::ConApp: {
      if (t.args().empty()) {
        os << sym(t.n().name);
        return;
      }
      os << "(" << sym(t.n().name);
      for (const auto& a : t.args()) {
        os << " ";
        emit_term(os, a, env);
      }
      os << ")";
      return;
    }
    case TermKind::FunApp: {
      const std::string& f = t.n().name;
      if (const Constructor* c = env.checker_of(f)) {
        os << "((_ is " << sym(c->name) << ") ";
        emit_term(os, t.args()[0], env);
        os << ")";
        return;
      }
      os << "(" << sym(f);
      for (const auto& a : t.args()) {
        os << " ";
        emit_term(os, a, env);
      }
      os << ")";
      return;
    }
    case TermKind::BinOp: {
      static const std::map<BinOpKind, std::string> ops = {
          {BinOpKind::Eq, "="},   {BinOpKind::Ne, "distinct"},
          {BinOpKind::Lt, "<"},   {BinOpKind::Le, "<="},
          {BinOpKind::Gt, ">"},   {BinOpKind::Ge, ">="},
          {BinOpKind::Add, "+"},  {BinOpKind::Sub, "-"},
          {BinOpKind::Mul, "*"},  {BinOpKind::And, "and"},
          {BinOpKind::Or, "or"},  {BinOpKind::Imp, "=>"}};
      os << "(" << ops.at(t.n().bop) << " ";
      emit_term(os, t.args()[0], env);
      os << " ";
      emit_term(os, t.args()[1], env);
      os << ")";
      return;
    }
    case TermKind::UnOp:
      os << "(not ";
      emit_term(os, t.args()[0], env);
      os << ")";
      return;
    case TermKind::Ite:
      os << "(ite ";
      emit_term(os, t.args()[0], env);
      os << " ";
      emit_term(os, t.args()[1], env);
      os << " ";
      emit_term(os, t.args()[2], env);
      os << ")";
      return;
    case TermKind::ULam:
      os << "(lam_" << mangle_sort(t.sort().fun_arg()) << "_"
         << mangle_sort(t.sort().fun_res()) << " " << t.n().binder << " ";
      emit_term(os, t.args()[0], env);
      os << ")";
      return;
    case TermKind::UApp:
      os << "(app_" << mangle_sort(t.args()[0].sort().fun_arg()) << "_"
         << mangle_sort(t.args()[0].sort().fun_res()) << " ";
      emit_term(os, t.args()[0], env);
      os << " ";
      emit_term(os, t.args()[1], env);
      os << ")";
      return;
  }
}

// ---- Reading ---------------------------------------------------------------

struct SExpr {
  bool atom = true;
  std::string s;
  std::vector<SExpr> kids;
};

struct Reader {
  std::istream& in;
  int c = ' ';

  explicit Reader(std::istream& i) : in(i) { next(); }
  void next() { c = in.get(); }

  void skip_ws() {
    while (c != EOF) {
      if (c == ';') {
        while (c != EOF && c != '\n') next();
      } else if (std::isspace(c)) {
        next();
      } else {
        break;
      }
    }
  }

  std::optional<SExpr> read() {
    skip_ws();
    if (c == EOF) return std::nullopt;
    if (c == '(') {
      next();
      SExpr e;
      e.atom = false;
      while (true) {
        skip_ws();
        if (c == EOF) throw ParseError("unterminated s-expression");
        if (c == ')') {
          next();
          return e;
        }
        auto kid = read();
        if (!kid) throw ParseError("unterminated s-expression");
        e.kids.push_back(std::move(*kid));
      }
    }
    if (c == '|') {
      next();
      SExpr e;
      while (c != EOF && c != '|') {
        e.s.push_back((char)c);
        next();
      }
      if (c != '|') throw ParseError("unterminated quoted symbol");
      next();
      return e;
    }
    SExpr e;
    while (c != EOF && !std::isspace(c) && c != '(' && c != ')' && c != ';') {
      e.s.push_back((char)c);
      next();
    }
    if (e.s.empty()) throw ParseError("stray character in script");
    return e;
  }
};

Sort parse_sort_tokens(const std::vector<std::string>& toks, size_t& i) {
  if (i >= toks.size()) throw ParseError("bad sort name");
  const std::string& t = toks[i++];
  if (t == "Int") return Sort::int_();
  if (t == "Bool") return Sort::bool_();
  if (t == "Univ") return Sort::univ();
  if (t == "Fun") {
    Sort a = parse_sort_tokens(toks, i);
    Sort r = parse_sort_tokens(toks, i);
    return Sort::fun(a, r);
  }
  throw ParseError("unknown sort " + t);
}

Sort parse_sort_name(const std::string& name) {
  std::vector<std::string> toks;
  std::string cur;
  for (char ch : name) {
    if (ch == '_') {
      if (!cur.empty()) toks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  size_t i = 0;
  Sort s = parse_sort_tokens(toks, i);
  if (i != toks.size()) throw ParseError("trailing sort tokens in " + name);
  return s;
}

Sort parse_sort(const SExpr& e) {
  if (!e.atom) throw ParseError("compound sorts are not supported");
  return parse_sort_name(e.s);
}

bool is_numeral(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit((unsigned char)c)) return false;
  return true;
}

struct ServerState {
  DefEnv env;
  std::map<std::string, Sort> vars;
  std::map<std::string, std::pair<std::vector<Sort>, Sort>> funs;
  std::vector<Term> assertions;

  Term build(const SExpr& e) {
    if (e.atom) {
      if (is_numeral(e.s)) return mk_int(Int(e.s));
      if (e.s == "true") return mk_bool(true);
      if (e.s == "false") return mk_bool(false);
      auto v = vars.find(e.s);
      if (v != vars.end()) return mk_var(e.s, v->second);
      if (env.find_constructor(e.s)) return mk_con(e.s, {});
      throw ParseError("unknown symbol " + e.s);
    }
    if (e.kids.empty()) throw ParseError("empty application");
    const SExpr& head = e.kids[0];
    std::vector<Term> args;
    for (size_t i = 1; i < e.kids.size(); i++) args.push_back(build(e.kids[i]));

    if (!head.atom) {  // ((_ is C) x)
      if (head.kids.size() == 3 && head.kids[0].s == "_" &&
          head.kids[1].s == "is" && args.size() == 1) {
        const Constructor* c = env.find_constructor(head.kids[2].s);
        if (!c) throw ParseError("tester of unknown constructor");
        return mk_fun(c->checker, {args[0]}, Sort::bool_());
      }
      throw ParseError("unsupported compound head");
    }
    const std::string& h = head.s;
    auto fold = [&](BinOpKind k) {
      Term t = args[0];
      for (size_t i = 1; i < args.size(); i++) t = mk_binop(k, t, args[i]);
      return t;
    };
    if (h == "+" && args.size() >= 2) return fold(BinOpKind::Add);
    if (h == "*" && args.size() >= 2) return fold(BinOpKind::Mul);
    if (h == "-" && args.size() == 1)
      return mk_binop(BinOpKind::Sub, mk_int(0), args[0]);
    if (h == "-" && args.size() >= 2) return fold(BinOpKind::Sub);
    if (h == "and") return mk_conj(args);
    if (h == "or" && args.size() >= 2) return fold(BinOpKind::Or);
    if (h == "=>" && args.size() == 2)
      return mk_binop(BinOpKind::Imp, args[0], args[1]);
    if (h == "not" && args.size() == 1) return mk_not(args[0]);
    if (h == "ite" && args.size() == 3)
      return mk_ite(args[0], args[1], args[2]);
    if ((h == "=" || h == "distinct") && args.size() == 2) {
      Term t = mk_binop(h == "=" ? BinOpKind::Eq : BinOpKind::Ne, args[0],
                        args[1]);
      return t;
    }
    if (h == "<" && args.size() == 2) return mk_binop(BinOpKind::Lt, args[0], args[1]);
    if (h == "<=" && args.size() == 2) return mk_binop(BinOpKind::Le, args[0], args[1]);
    if (h == ">" && args.size() == 2) return mk_binop(BinOpKind::Gt, args[0], args[1]);
    if (h == ">=" && args.size() == 2) return mk_binop(BinOpKind::Ge, args[0], args[1]);
    if (h.rfind("lam_", 0) == 0 && args.size() == 2) {
      if (args[0].kind() != TermKind::IntLit)
        throw ParseError("lambda binder index must be a literal");
      Sort fs = parse_sort_name("Fun_" + h.substr(4));
      return mk_ulam((int)args[0].n().ival.convert_to<long>(), args[1],
                     fs.fun_arg());
    }
    if (h.rfind("app_", 0) == 0 && args.size() == 2)
      return mk_uapp(args[0], args[1]);
    if (env.find_constructor(h)) return mk_con(h, std::move(args));
    if (const Constructor* c = env.checker_of(h))
      return mk_fun(c->checker, std::move(args), Sort::bool_());
    if (auto sel = env.selector_of(h))
      return mk_fun(h, std::move(args), sel->first->fields[sel->second].sort);
    auto f = funs.find(h);
    if (f != funs.end()) return mk_fun(h, std::move(args), f->second.second);
    throw ParseError("unknown function " + h);
  }

  void declare_datatypes(const SExpr& e) {
    // (declare-datatypes ((Univ 0)) ((con*)))
    if (e.kids.size() != 3 || e.kids[2].kids.size() != 1)
      throw ParseError("unsupported declare-datatypes shape");
    std::vector<Constructor> cons;
    std::vector<std::string> names;
    for (const SExpr& ce : e.kids[2].kids[0].kids) {
      Constructor c;
      c.name = ce.kids[0].s;
      c.datatype = "Univ";
      c.checker = "is_" + c.name;
      for (size_t i = 1; i < ce.kids.size(); i++) {
        const SExpr& fe = ce.kids[i];
        Sort fs = parse_sort(fe.kids[1]);
        c.fields.push_back({fs, fs.is_univ() ? "Univ" : ""});
        c.selectors.push_back(fe.kids[0].s);
      }
      names.push_back(c.name);
      cons.push_back(std::move(c));
    }
    env.add_datatype(Datatype{"Univ", names}, cons);
  }

  void handle(const SExpr& e, std::ostream& out) {
    if (e.atom || e.kids.empty() || !e.kids[0].atom) return;
    const std::string& cmd = e.kids[0].s;
    if (cmd == "declare-datatypes") {
      declare_datatypes(e);
    } else if (cmd == "declare-const") {
      vars.emplace(e.kids[1].s, parse_sort(e.kids[2]));
    } else if (cmd == "declare-fun") {
      if (e.kids[2].kids.empty()) {
        vars.emplace(e.kids[1].s, parse_sort(e.kids[3]));
      } else {
        std::vector<Sort> as;
        for (const SExpr& a : e.kids[2].kids) as.push_back(parse_sort(a));
        funs.emplace(e.kids[1].s,
                     std::make_pair(std::move(as), parse_sort(e.kids[3])));
      }
    } else if (cmd == "assert") {
      assertions.push_back(build(e.kids[1]));
    } else if (cmd == "check-sat") {
      SatStatus s = check_sat(env, assertions);
      switch (s.kind) {
        case SatStatus::Sat: out << "sat\n"; break;
        case SatStatus::Unsat: out << "unsat\n"; break;
        default: out << "unknown\n"; break;
      }
    }
    // set-logic / set-option / declare-sort / exit: nothing to do.
  }
};

}  // namespace

std::string emit_smtlib(const DefEnv& env, const std::vector<Term>& hyps,
                        const Term& goal) {
  Collector col{env, {}, {}, {}, false};
  for (const auto& h : hyps) col.walk(h);
  col.walk(goal);
  for (const auto& dt : env.datatype_order())
    for (const auto& cn : env.find_datatype(dt)->constructors)
      for (const auto& f : env.find_constructor(cn)->fields) col.sort_of(f.sort);

  std::ostringstream os;
  os << "(set-logic " << (env.has_datatypes() ? "QF_UFDTLIA" : "QF_UFLIA")
     << ")\n";
  if (env.has_datatypes()) {
    os << "(declare-datatypes ((Univ 0)) ((";
    bool first_con = true;
    for (const auto& dt : env.datatype_order()) {
      for (const auto& cn : env.find_datatype(dt)->constructors) {
        const Constructor* c = env.find_constructor(cn);
        if (!first_con) os << " ";
        first_con = false;
        if (c->fields.empty()) {
          os << "(" << sym(c->name) << ")";
        } else {
          os << "(" << sym(c->name);
          for (size_t i = 0; i < c->fields.size(); i++)
            os << " (" << sym(c->selectors[i]) << " "
               << mangle_sort(c->fields[i].sort) << ")";
          os << ")";
        }
      }
    }
    os << ")))\n";
  } else if (col.univ_used) {
    os << "(declare-sort Univ 0)\n";
  }
  for (const auto& [name, s] : col.fun_sorts) {
    os << "(declare-sort " << name << " 0)\n";
    os << "(declare-fun lam_" << mangle_sort(s.fun_arg()) << "_"
       << mangle_sort(s.fun_res()) << " (Int " << mangle_sort(s.fun_res())
       << ") " << name << ")\n";
    os << "(declare-fun app_" << mangle_sort(s.fun_arg()) << "_"
       << mangle_sort(s.fun_res()) << " (" << name << " "
       << mangle_sort(s.fun_arg()) << ") " << mangle_sort(s.fun_res())
       << ")\n";
  }
  for (const auto& [name, s] : col.vars)
    os << "(declare-const " << sym(name) << " " << mangle_sort(s) << ")\n";
  for (const auto& [name, sig] : col.funs) {
    os << "(declare-fun " << sym(name) << " (";
    for (size_t i = 0; i < sig.first.size(); i++)
      os << (i ? " " : "") << mangle_sort(sig.first[i]);
    os << ") " << mangle_sort(sig.second) << ")\n";
  }
  for (const auto& h : hyps) {
    os << "(assert ";
    emit_term(os, h, env);
    os << ")\n";
  }
  os << "(assert (not ";
  emit_term(os, goal, env);
  os << "))\n(check-sat)\n";
  return os.str();
}

int smt_server_run(std::istream& in, std::ostream& out) {
  try {
    Reader rd(in);
    ServerState st;
    while (auto e = rd.read()) st.handle(*e, out);
    return 0;
  } catch (const Error& e) {
    out << "(error \"" << e.what() << "\")\n";
    return 1;
  }
}

}  // namespace ple
