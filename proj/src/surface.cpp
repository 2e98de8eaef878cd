#include "ple/surface.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ple::surface {

// ---------------------------------------------------------------------------
// SType

SType SType::int_() {
  static SType t{std::make_shared<Node>(Node{STypeKind::Int, "", nullptr, nullptr, -1})};
  return t;
}
SType SType::bool_() {
  static SType t{std::make_shared<Node>(Node{STypeKind::Bool, "", nullptr, nullptr, -1})};
  return t;
}
SType SType::data(const std::string& name) {
  return SType{std::make_shared<Node>(Node{STypeKind::Data, name, nullptr, nullptr, -1})};
}
SType SType::fun(SType arg, SType res) {
  return SType{std::make_shared<Node>(
      Node{STypeKind::Fun, "", arg.node_, res.node_, -1})};
}
SType SType::meta(int id) {
  return SType{std::make_shared<Node>(Node{STypeKind::Meta, "", nullptr, nullptr, id})};
}

bool SType::operator==(const SType& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  if (node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case STypeKind::Int:
    case STypeKind::Bool:
      return true;
    case STypeKind::Data:
      return node_->name == o.node_->name;
    case STypeKind::Fun:
      return arg() == o.arg() && res() == o.res();
    case STypeKind::Meta:
      return node_->meta == o.node_->meta;
  }
  return false;
}

std::string SType::str() const {
  if (!valid()) return "?";
  switch (kind()) {
    case STypeKind::Int: return "Int";
    case STypeKind::Bool: return "Bool";
    case STypeKind::Data: return data_name();
    case STypeKind::Fun: {
      std::string a = arg().str();
      if (arg().valid() && arg().is_fun()) a = "(" + a + ")";
      return a + " -> " + res().str();
    }
    case STypeKind::Meta: return "?" + std::to_string(meta_id());
  }
  return "?";
}

Sort SType::core() const {
  switch (kind()) {
    case STypeKind::Int: return Sort::int_();
    case STypeKind::Bool: return Sort::bool_();
    case STypeKind::Data: return Sort::univ();
    case STypeKind::Fun: return Sort::fun(arg().core(), res().core());
    case STypeKind::Meta: break;
  }
  throw SortError("internal: unresolved sort variable survived checking");
}

// ---------------------------------------------------------------------------
// Expr builders

static ExprPtr node(ExprKind k, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = s;
  return e;
}

ExprPtr mk_intlit(Span s, const Int& v) {
  auto e = node(ExprKind::IntLit, s);
  e->ival = v;
  return e;
}
ExprPtr mk_boollit(Span s, bool v) {
  auto e = node(ExprKind::BoolLit, s);
  e->bval = v;
  return e;
}
ExprPtr mk_varref(Span s, const std::string& name) {
  auto e = node(ExprKind::Var, s);
  e->name = name;
  return e;
}
ExprPtr mk_conapp(Span s, const std::string& con, std::vector<ExprPtr> args) {
  auto e = node(ExprKind::Con, s);
  e->name = con;
  e->args = std::move(args);
  return e;
}
ExprPtr mk_app(Span s, ExprPtr head, std::vector<ExprPtr> args) {
  auto e = node(ExprKind::App, s);
  e->args.push_back(std::move(head));
  for (auto& a : args) e->args.push_back(std::move(a));
  return e;
}
ExprPtr mk_lam(Span s, const std::string& binder, std::optional<SType> annot,
               ExprPtr body) {
  auto e = node(ExprKind::Lam, s);
  e->name = binder;
  e->annot = std::move(annot);
  e->args.push_back(std::move(body));
  return e;
}
ExprPtr mk_ite_expr(Span s, ExprPtr c, ExprPtr t, ExprPtr el) {
  auto e = node(ExprKind::Ite, s);
  e->args = {std::move(c), std::move(t), std::move(el)};
  return e;
}
ExprPtr mk_case(Span s, ExprPtr scrut, std::vector<CaseAlt> alts) {
  auto e = node(ExprKind::Case, s);
  e->args.push_back(std::move(scrut));
  e->alts = std::move(alts);
  return e;
}
ExprPtr mk_binop_expr(Span s, BinOpKind op, ExprPtr a, ExprPtr b) {
  auto e = node(ExprKind::BinOp, s);
  e->bop = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}
ExprPtr mk_unop_expr(Span s, UnOpKind op, ExprPtr a) {
  auto e = node(ExprKind::UnOp, s);
  e->uop = op;
  e->args = {std::move(a)};
  return e;
}

BinOpKind rel_binop(Rel r) {
  switch (r) {
    case Rel::Eq: return BinOpKind::Eq;
    case Rel::Ne: return BinOpKind::Ne;
    case Rel::Le: return BinOpKind::Le;
    case Rel::Lt: return BinOpKind::Lt;
    case Rel::Ge: return BinOpKind::Ge;
    case Rel::Gt: return BinOpKind::Gt;
  }
  return BinOpKind::Eq;
}

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Ne: return "/=";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
  }
  return "=";
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  KwData, KwReflect, KwGoal, KwProof, KwHypothesis,
  KwIf, KwThen, KwElse, KwCase, KwOf, KwNot,
  Ident, UIdent, IntTok,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Semi, Colon, Arrow, Backslash, Underscore, Pipe, Slash,
  EqTok, NeTok, LeTok, LtTok, GeTok, GtTok,
  Plus, Minus, Star, AndAnd, OrOr, Implies,
  StepEq, StepNe, StepLe, StepLt, StepGe, StepGt, StepExt,
  StarStar, Because,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  Int ival;
  int line = 0, col = 0;
};

const char* tok_name(Tok k) {
  switch (k) {
    case Tok::KwData: return "'data'";
    case Tok::KwReflect: return "'reflect'";
    case Tok::KwGoal: return "'goal'";
    case Tok::KwProof: return "'proof'";
    case Tok::KwHypothesis: return "'hypothesis'";
    case Tok::KwIf: return "'if'";
    case Tok::KwThen: return "'then'";
    case Tok::KwElse: return "'else'";
    case Tok::KwCase: return "'case'";
    case Tok::KwOf: return "'of'";
    case Tok::KwNot: return "'not'";
    case Tok::Ident: return "identifier";
    case Tok::UIdent: return "constructor name";
    case Tok::IntTok: return "integer literal";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::Backslash: return "'\\'";
    case Tok::Underscore: return "'_'";
    case Tok::Pipe: return "'|'";
    case Tok::Slash: return "'/'";
    case Tok::EqTok: return "'='";
    case Tok::NeTok: return "'/='";
    case Tok::LeTok: return "'<='";
    case Tok::LtTok: return "'<'";
    case Tok::GeTok: return "'>='";
    case Tok::GtTok: return "'>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Implies: return "'=>'";
    case Tok::StepEq: return "'=.'";
    case Tok::StepNe: return "'/=.'";
    case Tok::StepLe: return "'<=.'";
    case Tok::StepLt: return "'<.'";
    case Tok::StepGe: return "'>=.'";
    case Tok::StepGt: return "'>.'";
    case Tok::StepExt: return "'=*.'";
    case Tok::StarStar: return "'**'";
    case Tok::Because: return "'∵'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : s_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws_and_comments();
      Token t;
      t.line = line_;
      t.col = col_;
      if (eof()) {
        t.kind = Tok::Eof;
        out.push_back(t);
        return out;
      }
      char c = cur();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string digits;
        while (!eof() && std::isdigit(static_cast<unsigned char>(cur())))
          digits += take();
        t.kind = Tok::IntTok;
        t.ival = Int(digits);
        t.text = digits;
      } else if (is_ident_start(c)) {
        std::string word;
        while (!eof() && is_ident_char(cur())) word += take();
        t.text = word;
        t.kind = classify_word(word);
      } else {
        t.kind = punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char cur() const { return s_[pos_]; }
  char peek(size_t k) const {
    return pos_ + k < s_.size() ? s_[pos_ + k] : '\0';
  }
  char take() {
    char c = s_[pos_++];
    if (c == '\n') {
      line_++;
      col_ = 1;
    } else {
      col_++;
    }
    return c;
  }

  static bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  void skip_ws_and_comments() {
    for (;;) {
      while (!eof() && (cur() == ' ' || cur() == '\t' || cur() == '\r' ||
                        cur() == '\n'))
        take();
      if (!eof() && cur() == '-' && peek(1) == '-') {
        while (!eof() && cur() != '\n') take();
        continue;
      }
      return;
    }
  }

  static Tok classify_word(const std::string& w) {
    if (w == "data") return Tok::KwData;
    if (w == "reflect") return Tok::KwReflect;
    if (w == "goal") return Tok::KwGoal;
    if (w == "proof") return Tok::KwProof;
    if (w == "hypothesis") return Tok::KwHypothesis;
    if (w == "if") return Tok::KwIf;
    if (w == "then") return Tok::KwThen;
    if (w == "else") return Tok::KwElse;
    if (w == "case") return Tok::KwCase;
    if (w == "of") return Tok::KwOf;
    if (w == "not") return Tok::KwNot;
    if (w == "_") return Tok::Underscore;
    if (std::isupper(static_cast<unsigned char>(w[0]))) return Tok::UIdent;
    return Tok::Ident;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, line_, col_);
  }

  Tok punct(Token& t) {
    // UTF-8 ∵ "because" sign.
    if (static_cast<unsigned char>(cur()) == 0xE2 &&
        static_cast<unsigned char>(peek(1)) == 0x88 &&
        static_cast<unsigned char>(peek(2)) == 0xB5) {
      take();
      take();
      take();
      return Tok::Because;
    }
    char c = cur();
    switch (c) {
      case '(': take(); return Tok::LParen;
      case ')': take(); return Tok::RParen;
      case '{': take(); return Tok::LBrace;
      case '}': take(); return Tok::RBrace;
      case '[': take(); return Tok::LBracket;
      case ']': take(); return Tok::RBracket;
      case ',': take(); return Tok::Comma;
      case ';': take(); return Tok::Semi;
      case ':': take(); return Tok::Colon;
      case '\\': take(); return Tok::Backslash;
      case '+': take(); return Tok::Plus;
      case '=':
        take();
        if (!eof() && cur() == '*' && peek(1) == '.') {
          take(); take();
          return Tok::StepExt;
        }
        if (!eof() && cur() == '.') { take(); return Tok::StepEq; }
        if (!eof() && cur() == '>') { take(); return Tok::Implies; }
        return Tok::EqTok;
      case '/':
        take();
        if (!eof() && cur() == '=') {
          take();
          if (!eof() && cur() == '.') { take(); return Tok::StepNe; }
          return Tok::NeTok;
        }
        return Tok::Slash;
      case '<':
        take();
        if (!eof() && cur() == '=') {
          take();
          if (!eof() && cur() == '.') { take(); return Tok::StepLe; }
          return Tok::LeTok;
        }
        if (!eof() && cur() == '.') { take(); return Tok::StepLt; }
        return Tok::LtTok;
      case '>':
        take();
        if (!eof() && cur() == '=') {
          take();
          if (!eof() && cur() == '.') { take(); return Tok::StepGe; }
          return Tok::GeTok;
        }
        if (!eof() && cur() == '.') { take(); return Tok::StepGt; }
        return Tok::GtTok;
      case '*':
        take();
        if (!eof() && cur() == '*') { take(); return Tok::StarStar; }
        return Tok::Star;
      case '-':
        take();
        if (!eof() && cur() == '>') { take(); return Tok::Arrow; }
        return Tok::Minus;
      case '&':
        take();
        if (!eof() && cur() == '&') { take(); return Tok::AndAnd; }
        fail("expected '&&'");
      case '|':
        take();
        if (!eof() && cur() == '|') { take(); return Tok::OrOr; }
        return Tok::Pipe;
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
    t.text.clear();  // unreachable
    return Tok::Eof;
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program p;
    int goal_count = 0;
    while (!at(Tok::Eof)) {
      switch (peek().kind) {
        case Tok::KwData: p.datatypes.push_back(parse_data()); break;
        case Tok::KwReflect: p.defs.push_back(parse_reflect()); break;
        case Tok::KwGoal: p.goals.push_back(parse_goal(++goal_count)); break;
        case Tok::KwProof: p.proofs.push_back(parse_proof()); break;
        default:
          fail("expected a top-level item (data, reflect, goal, proof)");
      }
    }
    return p;
  }

 private:
  const Token& peek(size_t k = 0) const {
    size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token eat(Tok k, const char* what) {
    if (!at(k))
      fail(std::string("expected ") + tok_name(k) + " " + what + ", found " +
           tok_name(peek().kind));
    return toks_[pos_++];
  }
  bool accept(Tok k) {
    if (at(k)) {
      pos_++;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, t.line, t.col);
  }
  static Span span_of(const Token& t) { return Span{t.line, t.col}; }

  // data List = Nil | Cons Int List
  DataDecl parse_data() {
    DataDecl d;
    d.span = span_of(peek());
    eat(Tok::KwData, "to begin a datatype declaration");
    d.name = eat(Tok::UIdent, "as the datatype name").text;
    eat(Tok::EqTok, "after the datatype name");
    for (;;) {
      DataDecl::Con c;
      c.span = span_of(peek());
      c.name = eat(Tok::UIdent, "as a constructor name").text;
      while (at(Tok::UIdent) || at(Tok::LParen)) c.fields.push_back(parse_sort_atom());
      d.cons.push_back(std::move(c));
      if (!accept(Tok::Pipe)) break;
    }
    return d;
  }

  SType parse_sort() {
    SType l = parse_sort_atom();
    if (accept(Tok::Arrow)) return SType::fun(l, parse_sort());
    return l;
  }

  SType parse_sort_atom() {
    if (accept(Tok::LParen)) {
      SType t = parse_sort();
      eat(Tok::RParen, "to close the sort");
      return t;
    }
    Token t = eat(Tok::UIdent, "as a sort name");
    if (t.text == "Int") return SType::int_();
    if (t.text == "Bool") return SType::bool_();
    return SType::data(t.text);
  }

  // reflect fib (n : Int) : Int / [n] = <expr>
  ReflectDef parse_reflect() {
    ReflectDef d;
    d.span = span_of(peek());
    eat(Tok::KwReflect, "to begin a definition");
    d.name = eat(Tok::Ident, "as the function name").text;
    while (at(Tok::LParen)) {
      eat(Tok::LParen, "to open a parameter");
      std::string pn = eat(Tok::Ident, "as the parameter name").text;
      eat(Tok::Colon, "after the parameter name");
      SType ps = parse_sort();
      eat(Tok::RParen, "to close the parameter");
      d.params.emplace_back(std::move(pn), ps);
    }
    eat(Tok::Colon, "before the result sort");
    d.ret = parse_sort();
    if (accept(Tok::Slash)) {
      eat(Tok::LBracket, "to open the termination metric");
      d.metric.push_back(parse_expr());
      while (accept(Tok::Comma)) d.metric.push_back(parse_expr());
      eat(Tok::RBracket, "to close the termination metric");
    }
    eat(Tok::EqTok, "before the definition body");
    d.body = parse_expr();
    return d;
  }

  // goal [name] (ple|script): [hypothesis e;]* lhs REL rhs
  GoalDecl parse_goal(int index) {
    GoalDecl g;
    g.span = span_of(peek());
    eat(Tok::KwGoal, "to begin a goal");
    std::string first;
    if (at(Tok::Ident)) first = toks_[pos_++].text;
    std::string mode_word;
    if (at(Tok::Colon)) {
      mode_word = first;
      first.clear();
    } else if (at(Tok::Ident)) {
      mode_word = toks_[pos_++].text;
    } else {
      fail("expected a goal mode ('ple' or 'script')");
    }
    if (mode_word == "ple")
      g.mode = GoalMode::Ple;
    else if (mode_word == "script")
      g.mode = GoalMode::Script;
    else
      fail("unknown goal mode '" + mode_word + "' (expected 'ple' or 'script')");
    g.name = first.empty() ? "goal" + std::to_string(index) : first;
    eat(Tok::Colon, "after the goal mode");
    while (at(Tok::KwHypothesis)) {
      pos_++;
      g.hyps.push_back(parse_expr());
      eat(Tok::Semi, "after the hypothesis");
    }
    ExprPtr stmt = parse_expr();
    if (stmt->kind != ExprKind::BinOp || !binop_is_cmp(stmt->bop))
      throw ParseError("goal statement must be a relation (lhs = rhs, lhs <= rhs, ...)",
                       stmt->span.line, stmt->span.col);
    switch (stmt->bop) {
      case BinOpKind::Eq: g.rel = Rel::Eq; break;
      case BinOpKind::Ne: g.rel = Rel::Ne; break;
      case BinOpKind::Le: g.rel = Rel::Le; break;
      case BinOpKind::Lt: g.rel = Rel::Lt; break;
      case BinOpKind::Ge: g.rel = Rel::Ge; break;
      case BinOpKind::Gt: g.rel = Rel::Gt; break;
      default: fail("goal statement must be a relation");
    }
    g.lhs = stmt->args[0];
    g.rhs = stmt->args[1];
    return g;
  }

  // proof name : goalname { start (=. e [justs])* ** QED }
  ProofDecl parse_proof() {
    ProofDecl p;
    p.span = span_of(peek());
    eat(Tok::KwProof, "to begin a proof");
    p.name = eat(Tok::Ident, "as the proof name").text;
    eat(Tok::Colon, "after the proof name");
    p.goal = eat(Tok::Ident, "as the goal the proof discharges").text;
    eat(Tok::LBrace, "to open the proof body");
    p.start = parse_expr();
    while (is_step_tok(peek().kind)) {
      ProofStep st;
      st.span = span_of(peek());
      switch (toks_[pos_++].kind) {
        case Tok::StepEq: st.rel = Rel::Eq; break;
        case Tok::StepNe: st.rel = Rel::Ne; break;
        case Tok::StepLe: st.rel = Rel::Le; break;
        case Tok::StepLt: st.rel = Rel::Lt; break;
        case Tok::StepGe: st.rel = Rel::Ge; break;
        case Tok::StepGt: st.rel = Rel::Gt; break;
        case Tok::StepExt:
          st.rel = Rel::Eq;
          st.ext = true;
          break;
        default: fail("internal: bad step token");
      }
      st.rhs = parse_expr();
      if (accept(Tok::Because)) {
        if (accept(Tok::LBracket)) {
          st.justs.push_back(parse_just());
          while (accept(Tok::Comma)) st.justs.push_back(parse_just());
          eat(Tok::RBracket, "to close the justification list");
        } else {
          st.justs.push_back(parse_just());
        }
      }
      p.steps.push_back(std::move(st));
    }
    if (p.steps.empty()) fail("a proof needs at least one step");
    eat(Tok::StarStar, "before QED");
    Token qed = eat(Tok::UIdent, "QED to end the proof");
    if (qed.text != "QED") fail("expected 'QED' after '**'");
    eat(Tok::RBrace, "to close the proof body");
    return p;
  }

  static bool is_step_tok(Tok k) {
    switch (k) {
      case Tok::StepEq: case Tok::StepNe: case Tok::StepLe: case Tok::StepLt:
      case Tok::StepGe: case Tok::StepGt: case Tok::StepExt:
        return true;
      default:
        return false;
    }
  }

  Justification parse_just() {
    Justification j;
    j.span = span_of(peek());
    j.expr = parse_expr();
    return j;
  }

  // Expressions, loosest binding first.
  ExprPtr parse_expr() { return parse_imp(); }

  ExprPtr parse_imp() {
    ExprPtr l = parse_or();
    if (at(Tok::Implies)) {
      Span s = span_of(peek());
      pos_++;
      return mk_binop_expr(s, BinOpKind::Imp, l, parse_imp());
    }
    return l;
  }

  ExprPtr parse_or() {
    ExprPtr l = parse_and();
    if (at(Tok::OrOr)) {
      Span s = span_of(peek());
      pos_++;
      return mk_binop_expr(s, BinOpKind::Or, l, parse_or());
    }
    return l;
  }

  ExprPtr parse_and() {
    ExprPtr l = parse_cmp();
    if (at(Tok::AndAnd)) {
      Span s = span_of(peek());
      pos_++;
      return mk_binop_expr(s, BinOpKind::And, l, parse_and());
    }
    return l;
  }

  static std::optional<BinOpKind> cmp_op(Tok k) {
    switch (k) {
      case Tok::EqTok: return BinOpKind::Eq;
      case Tok::NeTok: return BinOpKind::Ne;
      case Tok::LeTok: return BinOpKind::Le;
      case Tok::LtTok: return BinOpKind::Lt;
      case Tok::GeTok: return BinOpKind::Ge;
      case Tok::GtTok: return BinOpKind::Gt;
      default: return std::nullopt;
    }
  }

  ExprPtr parse_cmp() {
    ExprPtr l = parse_add();
    if (auto op = cmp_op(peek().kind)) {
      Span s = span_of(peek());
      pos_++;
      ExprPtr r = parse_add();
      if (cmp_op(peek().kind))
        fail("comparisons do not associate; parenthesize");
      return mk_binop_expr(s, *op, l, r);
    }
    return l;
  }

  ExprPtr parse_add() {
    ExprPtr l = parse_mul();
    for (;;) {
      if (at(Tok::Plus)) {
        Span s = span_of(peek());
        pos_++;
        l = mk_binop_expr(s, BinOpKind::Add, l, parse_mul());
      } else if (at(Tok::Minus)) {
        Span s = span_of(peek());
        pos_++;
        l = mk_binop_expr(s, BinOpKind::Sub, l, parse_mul());
      } else {
        return l;
      }
    }
  }

  ExprPtr parse_mul() {
    ExprPtr l = parse_unary();
    while (at(Tok::Star)) {
      Span s = span_of(peek());
      pos_++;
      l = mk_binop_expr(s, BinOpKind::Mul, l, parse_unary());
    }
    return l;
  }

  ExprPtr parse_unary() {
    if (at(Tok::Minus)) {
      Span s = span_of(peek());
      pos_++;
      ExprPtr a = parse_unary();
      if (a->kind == ExprKind::IntLit) {
        a->ival = -a->ival;
        a->span = s;
        return a;
      }
      return mk_binop_expr(s, BinOpKind::Sub, mk_intlit(s, Int(0)), a);
    }
    if (at(Tok::KwNot)) {
      Span s = span_of(peek());
      pos_++;
      return mk_unop_expr(s, UnOpKind::Not, parse_unary());
    }
    if (at(Tok::KwIf)) return parse_if();
    if (at(Tok::KwCase)) return parse_case();
    if (at(Tok::Backslash)) return parse_lam();
    return parse_app();
  }

  ExprPtr parse_if() {
    Span s = span_of(peek());
    eat(Tok::KwIf, "");
    ExprPtr c = parse_expr();
    eat(Tok::KwThen, "after the condition");
    ExprPtr t = parse_expr();
    eat(Tok::KwElse, "after the then-branch");
    ExprPtr e = parse_expr();
    return mk_ite_expr(s, c, t, e);
  }

  ExprPtr parse_case() {
    Span s = span_of(peek());
    eat(Tok::KwCase, "");
    ExprPtr scrut = parse_expr();
    eat(Tok::KwOf, "after the scrutinee");
    eat(Tok::LBrace, "to open the alternatives");
    std::vector<CaseAlt> alts;
    for (;;) {
      CaseAlt a;
      a.span = span_of(peek());
      if (accept(Tok::Underscore)) {
        a.wildcard = true;
      } else {
        a.con = eat(Tok::UIdent, "as the pattern constructor").text;
        while (at(Tok::Ident) || at(Tok::Underscore)) {
          if (accept(Tok::Underscore))
            fail("wildcard field patterns are not supported; name the field");
          else
            a.binders.push_back(toks_[pos_++].text);
        }
      }
      eat(Tok::Arrow, "after the pattern");
      a.body = parse_expr();
      alts.push_back(std::move(a));
      if (!accept(Tok::Semi)) break;
    }
    eat(Tok::RBrace, "to close the alternatives");
    return mk_case(s, scrut, std::move(alts));
  }

  ExprPtr parse_lam() {
    Span s = span_of(peek());
    eat(Tok::Backslash, "");
    std::string binder;
    std::optional<SType> annot;
    if (accept(Tok::LParen)) {
      binder = eat(Tok::Ident, "as the lambda binder").text;
      eat(Tok::Colon, "after the lambda binder");
      annot = parse_sort();
      eat(Tok::RParen, "to close the annotated binder");
    } else {
      binder = eat(Tok::Ident, "as the lambda binder").text;
    }
    eat(Tok::Arrow, "after the lambda binder");
    return mk_lam(s, binder, std::move(annot), parse_expr());
  }

  bool at_atom_start() const {
    switch (peek().kind) {
      case Tok::IntTok: case Tok::Ident: case Tok::UIdent: case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  ExprPtr parse_app() {
    ExprPtr head = parse_atom();
    bool applies = head->kind == ExprKind::Var || head->kind == ExprKind::Con ||
                   head->kind == ExprKind::App || head->kind == ExprKind::Lam;
    if (!applies || !at_atom_start()) return head;
    std::vector<ExprPtr> args;
    while (at_atom_start()) args.push_back(parse_atom());
    if (head->kind == ExprKind::Con && head->args.empty()) {
      head->args = std::move(args);
      return head;
    }
    return mk_app(head->span, head, std::move(args));
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    Span s = span_of(t);
    switch (t.kind) {
      case Tok::IntTok:
        pos_++;
        return mk_intlit(s, t.ival);
      case Tok::Ident:
        pos_++;
        return mk_varref(s, t.text);
      case Tok::UIdent:
        pos_++;
        if (t.text == "True") return mk_boollit(s, true);
        if (t.text == "False") return mk_boollit(s, false);
        return mk_conapp(s, t.text, {});
      case Tok::LParen: {
        pos_++;
        ExprPtr e = parse_expr();
        eat(Tok::RParen, "to close the expression");
        return e;
      }
      default:
        fail(std::string("expected an expression, found ") + tok_name(t.kind));
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

Program parse_program(const std::string& text) {
  Lexer lex(text);
  Parser parser(lex.run());
  return parser.run();
}

// ---------------------------------------------------------------------------
// Sort checking

namespace {

std::string at(Span s) {
  return " (line " + std::to_string(s.line) + ", col " + std::to_string(s.col) +
         ")";
}

[[noreturn]] void sort_fail(Span s, const std::string& msg) {
  throw SortError(msg + at(s));
}

[[noreturn]] void name_fail(Span s, const std::string& msg) {
  throw ParseError(msg, s.line, s.col);
}

void check_reserved(Span s, const std::string& name) {
  for (const char* p : {"is_", "sel_", "lam_", "app_", "undef_"}) {
    if (name.rfind(p, 0) == 0)
      sort_fail(s, "names beginning with '" + std::string(p) + "' are reserved");
  }
}

struct ConSig {
  std::string datatype;
  std::vector<SType> fields;
};

struct DefSig {
  std::vector<SType> params;
  SType ret;
};

class Checker {
 public:
  Program run(Program p, std::vector<std::string>* warnings) {
    collect_datatypes(p);
    for (auto& d : p.defs) check_def(d);
    for (size_t i = 0; i < p.goals.size(); ++i) check_goal(p.goals[i]);
    for (auto& pr : p.proofs) check_proof_decl(pr);
    if (warnings && !p.defs.empty())
      warnings->push_back(
          "totality of reflected definitions is a trusted input contract; "
          "termination metrics are parsed but not checked");
    return p;
  }

 private:
  // -- inference state
  std::vector<std::optional<SType>> sol_;
  std::map<std::string, const DataDecl*> datatypes_;
  std::map<std::string, ConSig> cons_;
  std::map<std::string, DefSig> defs_;
  std::map<std::string, const GoalDecl*> goals_;
  std::set<std::string> proof_names_;
  std::set<std::string> proved_goals_;
  std::vector<std::map<std::string, SType>> scopes_;
  std::map<std::string, SType>* free_scope_ = nullptr;

  SType fresh() {
    sol_.emplace_back(std::nullopt);
    return SType::meta(static_cast<int>(sol_.size()) - 1);
  }

  SType resolve(SType t) {
    while (t.valid() && t.is_meta() && sol_[t.meta_id()].has_value())
      t = *sol_[t.meta_id()];
    return t;
  }

  bool occurs(int id, SType t) {
    t = resolve(t);
    if (t.is_meta()) return t.meta_id() == id;
    if (t.is_fun()) return occurs(id, t.arg()) || occurs(id, t.res());
    return false;
  }

  void unify(SType a, SType b, Span s, const std::string& ctx) {
    a = resolve(a);
    b = resolve(b);
    if (a.is_meta()) {
      if (b.is_meta() && b.meta_id() == a.meta_id()) return;
      if (occurs(a.meta_id(), b)) sort_fail(s, "infinite sort in " + ctx);
      sol_[a.meta_id()] = b;
      return;
    }
    if (b.is_meta()) {
      unify(b, a, s, ctx);
      return;
    }
    if (a.kind() != b.kind() ||
        (a.is_data() && a.data_name() != b.data_name())) {
      sort_fail(s, "sort mismatch in " + ctx + ": expected " + deep(a).str() +
                       ", got " + deep(b).str());
    }
    if (a.is_fun()) {
      unify(a.arg(), b.arg(), s, ctx);
      unify(a.res(), b.res(), s, ctx);
    }
  }

  // Deep-resolves for diagnostics and zonking; metas may remain.
  SType deep(SType t) {
    t = resolve(t);
    if (t.is_fun()) return SType::fun(deep(t.arg()), deep(t.res()));
    return t;
  }

  SType zonk(SType t, Span s, const std::string& what) {
    SType r = deep(t);
    if (has_meta(r))
      sort_fail(s, "ambiguous sort for " + what +
                       "; add an annotation or use it in a sorted context");
    return r;
  }

  static bool has_meta(const SType& t) {
    if (!t.valid() || t.is_meta()) return true;
    if (t.is_fun()) return has_meta(t.arg()) || has_meta(t.res());
    return false;
  }

  void check_sort_names(const SType& t, Span s) {
    if (t.is_data() && !datatypes_.count(t.data_name()))
      name_fail(s, "unknown datatype '" + t.data_name() + "'");
    if (t.is_fun()) {
      check_sort_names(t.arg(), s);
      check_sort_names(t.res(), s);
    }
  }

  void collect_datatypes(const Program& p) {
    for (const auto& d : p.datatypes) {
      if (d.name == "Int" || d.name == "Bool")
        name_fail(d.span, "datatype name '" + d.name + "' is reserved");
      if (!datatypes_.emplace(d.name, &d).second)
        name_fail(d.span, "duplicate datatype '" + d.name + "'");
    }
    for (const auto& d : p.datatypes) {
      for (const auto& c : d.cons) {
        if (c.name == "True" || c.name == "False" || c.name == "QED")
          name_fail(c.span, "constructor name '" + c.name + "' is reserved");
        for (const auto& f : c.fields) check_sort_names(f, c.span);
        if (!cons_.emplace(c.name, ConSig{d.name, c.fields}).second)
          name_fail(c.span, "duplicate constructor '" + c.name + "'");
      }
    }
  }

  SType* lookup_local(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  SType elab(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit:
        return e->stype = SType::int_();
      case ExprKind::BoolLit:
        return e->stype = SType::bool_();
      case ExprKind::Var:
        return e->stype = elab_var(e);
      case ExprKind::Con:
        return e->stype = elab_con(e);
      case ExprKind::App:
        return e->stype = elab_app(e);
      case ExprKind::Lam:
        return e->stype = elab_lam(e);
      case ExprKind::Ite: {
        unify(elab(e->args[0]), SType::bool_(), e->args[0]->span,
              "an if-condition");
        SType t = elab(e->args[1]);
        unify(t, elab(e->args[2]), e->span, "the branches of an if");
        return e->stype = t;
      }
      case ExprKind::Case:
        return e->stype = elab_case(e);
      case ExprKind::BinOp:
        return e->stype = elab_binop(e);
      case ExprKind::UnOp:
        unify(elab(e->args[0]), SType::bool_(), e->args[0]->span,
              "the operand of 'not'");
        return e->stype = SType::bool_();
    }
    sort_fail(e->span, "internal: unknown expression kind");
  }

  SType elab_var(const ExprPtr& e) {
    if (SType* s = lookup_local(e->name)) return *s;
    if (free_scope_) {
      auto f = free_scope_->find(e->name);
      if (f != free_scope_->end()) return f->second;
    }
    auto d = defs_.find(e->name);
    if (d != defs_.end()) {
      if (d->second.params.empty()) {
        // Nullary definition: rewrite into a (fully applied) call node.
        e->kind = ExprKind::App;
        e->args = {mk_varref(e->span, e->name)};
        e->name.clear();
        e->def_call = true;
        e->args[0]->stype = d->second.ret;
        return d->second.ret;
      }
      sort_fail(e->span, "reflected function '" + e->name +
                             "' must be fully applied; wrap it in a lambda "
                             "like \\x -> " +
                             e->name + " x");
    }
    if (free_scope_) {
      check_reserved(e->span, e->name);
      SType s = fresh();
      free_scope_->emplace(e->name, s);
      return s;
    }
    sort_fail(e->span, "unbound variable '" + e->name + "'");
  }

  SType elab_con(const ExprPtr& e) {
    auto c = cons_.find(e->name);
    if (c == cons_.end())
      name_fail(e->span, "unknown constructor '" + e->name + "'");
    const ConSig& sig = c->second;
    if (e->args.size() != sig.fields.size())
      sort_fail(e->span, "constructor '" + e->name + "' expects " +
                             std::to_string(sig.fields.size()) +
                             " fields, got " + std::to_string(e->args.size()));
    for (size_t i = 0; i < e->args.size(); ++i)
      unify(sig.fields[i], elab(e->args[i]), e->args[i]->span,
            "a field of '" + e->name + "'");
    return SType::data(sig.datatype);
  }

  SType elab_app(const ExprPtr& e) {
    ExprPtr head = e->args[0];
    if (head->kind == ExprKind::Var && !lookup_local(head->name) &&
        !(free_scope_ && free_scope_->count(head->name))) {
      auto d = defs_.find(head->name);
      if (d != defs_.end()) return elab_def_call(e, d->second);
    }
    SType s = elab(head);
    for (size_t i = 1; i < e->args.size(); ++i) {
      SType as = elab(e->args[i]);
      SType rs = fresh();
      unify(s, SType::fun(as, rs), e->args[i]->span, "an application");
      s = rs;
    }
    return s;
  }

  SType elab_def_call(const ExprPtr& e, const DefSig& sig) {
    size_t arity = sig.params.size();
    size_t argc = e->args.size() - 1;
    ExprPtr head = e->args[0];
    if (argc < arity)
      sort_fail(e->span, "reflected function '" + head->name +
                             "' is partially applied (" + std::to_string(argc) +
                             " of " + std::to_string(arity) +
                             " arguments); wrap it in a lambda");
    head->stype = sig.ret;
    for (size_t i = 0; i < arity; ++i)
      head->stype = SType::fun(sig.params[arity - 1 - i], head->stype);
    if (argc > arity) {
      // Saturated call returning a function, then applied further: split the
      // node so the call itself stays fully applied.
      auto inner = mk_app(e->span, head,
                          {e->args.begin() + 1, e->args.begin() + 1 + arity});
      inner->def_call = true;
      std::vector<ExprPtr> rest(e->args.begin() + 1 + arity, e->args.end());
      e->args.clear();
      e->args.push_back(inner);
      for (auto& r : rest) e->args.push_back(r);
      for (size_t i = 0; i < arity; ++i)
        unify(sig.params[i], elab(inner->args[i + 1]),
              inner->args[i + 1]->span,
              "an argument of '" + head->name + "'");
      inner->stype = sig.ret;
      SType s = sig.ret;
      for (size_t i = 1; i < e->args.size(); ++i) {
        SType as = elab(e->args[i]);
        SType rs = fresh();
        unify(s, SType::fun(as, rs), e->args[i]->span, "an application");
        s = rs;
      }
      return s;
    }
    e->def_call = true;
    for (size_t i = 0; i < arity; ++i)
      unify(sig.params[i], elab(e->args[i + 1]), e->args[i + 1]->span,
            "an argument of '" + head->name + "'");
    return sig.ret;
  }

  SType elab_lam(const ExprPtr& e) {
    check_reserved(e->span, e->name);
    SType bs;
    if (e->annot) {
      check_sort_names(*e->annot, e->span);
      bs = *e->annot;
    } else {
      bs = fresh();
    }
    scopes_.push_back({{e->name, bs}});
    SType body = elab(e->args[0]);
    scopes_.pop_back();
    return SType::fun(bs, body);
  }

  SType elab_case(const ExprPtr& e) {
    SType scrut = elab(e->args[0]);
    std::string dt;
    std::set<std::string> seen;
    bool saw_wild = false;
    for (const auto& a : e->alts) {
      if (saw_wild) sort_fail(a.span, "unreachable alternative after wildcard");
      if (a.wildcard) {
        saw_wild = true;
        continue;
      }
      auto c = cons_.find(a.con);
      if (c == cons_.end())
        name_fail(a.span, "unknown constructor '" + a.con + "'");
      if (dt.empty())
        dt = c->second.datatype;
      else if (dt != c->second.datatype)
        sort_fail(a.span, "pattern constructor '" + a.con + "' belongs to '" +
                              c->second.datatype + "', not '" + dt + "'");
      if (!seen.insert(a.con).second)
        sort_fail(a.span, "duplicate case alternative '" + a.con + "'");
      if (a.binders.size() != c->second.fields.size())
        sort_fail(a.span, "pattern '" + a.con + "' expects " +
                              std::to_string(c->second.fields.size()) +
                              " fields, got " +
                              std::to_string(a.binders.size()));
    }
    if (!dt.empty()) {
      unify(scrut, SType::data(dt), e->args[0]->span, "a case scrutinee");
      if (!saw_wild) {
        for (const auto& cn : datatypes_.at(dt)->cons) {
          if (!seen.count(cn.name))
            sort_fail(e->span, "non-exhaustive case: missing '" + cn.name +
                                   "' (add the alternative or a wildcard)");
        }
      }
    }
    SType result = fresh();
    for (const auto& a : e->alts) {
      std::map<std::string, SType> frame;
      if (!a.wildcard) {
        const ConSig& sig = cons_.at(a.con);
        for (size_t i = 0; i < a.binders.size(); ++i) {
          check_reserved(a.span, a.binders[i]);
          if (!frame.emplace(a.binders[i], sig.fields[i]).second)
            sort_fail(a.span, "pattern binder '" + a.binders[i] +
                                  "' is repeated; patterns are linear");
        }
      }
      scopes_.push_back(std::move(frame));
      unify(result, elab(a.body), a.body->span, "the case alternatives");
      scopes_.pop_back();
    }
    return result;
  }

  SType elab_binop(const ExprPtr& e) {
    SType a = elab(e->args[0]);
    SType b = elab(e->args[1]);
    switch (e->bop) {
      case BinOpKind::Add:
      case BinOpKind::Sub:
      case BinOpKind::Mul:
        if (e->bop == BinOpKind::Mul &&
            e->args[0]->kind != ExprKind::IntLit &&
            e->args[1]->kind != ExprKind::IntLit)
          sort_fail(e->span,
                    "nonlinear multiplication; one operand must be an "
                    "integer literal");
        unify(a, SType::int_(), e->args[0]->span, "an arithmetic operand");
        unify(b, SType::int_(), e->args[1]->span, "an arithmetic operand");
        return SType::int_();
      case BinOpKind::Lt:
      case BinOpKind::Le:
      case BinOpKind::Gt:
      case BinOpKind::Ge:
        unify(a, SType::int_(), e->args[0]->span, "a comparison operand");
        unify(b, SType::int_(), e->args[1]->span, "a comparison operand");
        return SType::bool_();
      case BinOpKind::Eq:
      case BinOpKind::Ne:
        unify(a, b, e->span, "the sides of an equality");
        return SType::bool_();
      case BinOpKind::And:
      case BinOpKind::Or:
      case BinOpKind::Imp:
        unify(a, SType::bool_(), e->args[0]->span, "a boolean operand");
        unify(b, SType::bool_(), e->args[1]->span, "a boolean operand");
        return SType::bool_();
    }
    sort_fail(e->span, "internal: unknown operator");
  }

  void zonk_expr(const ExprPtr& e) {
    e->stype = zonk(e->stype, e->span, "this expression");
    for (const auto& a : e->args) zonk_expr(a);
    for (const auto& alt : e->alts) zonk_expr(alt.body);
  }

  void check_def(ReflectDef& d) {
    check_reserved(d.span, d.name);
    if (defs_.count(d.name))
      name_fail(d.span, "duplicate definition '" + d.name + "'");
    DefSig sig;
    std::map<std::string, SType> frame;
    for (auto& [pn, ps] : d.params) {
      check_reserved(d.span, pn);
      check_sort_names(ps, d.span);
      if (!frame.emplace(pn, ps).second)
        name_fail(d.span, "duplicate parameter '" + pn + "' in '" + d.name + "'");
      sig.params.push_back(ps);
    }
    check_sort_names(d.ret, d.span);
    sig.ret = d.ret;
    defs_.emplace(d.name, sig);  // visible to its own body (recursion)
    scopes_.clear();
    scopes_.push_back(std::move(frame));
    free_scope_ = nullptr;
    unify(d.ret, elab(d.body), d.body->span, "the body of '" + d.name + "'");
    for (auto& m : d.metric)
      unify(elab(m), SType::int_(), m->span, "a termination metric");
    zonk_expr(d.body);
    for (auto& m : d.metric) zonk_expr(m);
    scopes_.clear();
  }

  void collect_free_vars(std::map<std::string, SType>& scope, Span span,
                         std::vector<std::pair<std::string, SType>>& out) {
    for (auto& [name, st] : scope) {
      SType r = deep(st);
      if (has_meta(r))
        sort_fail(span, "ambiguous sort for variable '" + name +
                            "'; use it in a sorted context");
      out.emplace_back(name, r);
    }
  }

  void check_goal(GoalDecl& g) {
    if (goals_.count(g.name) || defs_.count(g.name))
      name_fail(g.span, "duplicate goal '" + g.name + "'");
    scopes_.clear();
    std::map<std::string, SType> frees;
    free_scope_ = &frees;
    for (auto& h : g.hyps)
      unify(elab(h), SType::bool_(), h->span, "a hypothesis");
    SType l = elab(g.lhs);
    SType r = elab(g.rhs);
    unify(l, r, g.span, "the sides of the goal");
    if (g.rel != Rel::Eq && g.rel != Rel::Ne)
      unify(l, SType::int_(), g.span, "an ordered goal");
    for (auto& h : g.hyps) zonk_expr(h);
    zonk_expr(g.lhs);
    zonk_expr(g.rhs);
    g.free_vars.clear();
    collect_free_vars(frees, g.span, g.free_vars);
    free_scope_ = nullptr;
    goals_.emplace(g.name, &g);
  }

  void check_proof_decl(ProofDecl& p) {
    if (!proof_names_.insert(p.name).second)
      name_fail(p.span, "duplicate proof '" + p.name + "'");
    auto g = goals_.find(p.goal);
    if (g == goals_.end())
      name_fail(p.span, "proof '" + p.name + "' refers to unknown goal '" +
                            p.goal + "'");
    if (g->second->mode != GoalMode::Script)
      name_fail(p.span, "goal '" + p.goal +
                            "' is not script-mode; only script goals take "
                            "proofs");
    if (!proved_goals_.insert(p.goal).second)
      name_fail(p.span, "goal '" + p.goal + "' already has a proof");
    scopes_.clear();
    std::map<std::string, SType> frees;
    for (const auto& [n, s] : g->second->free_vars) frees.emplace(n, s);
    free_scope_ = &frees;
    SType chain = elab(p.start);
    unify(chain, g->second->lhs->stype, p.start->span,
          "the proof start against the goal");
    for (auto& st : p.steps) {
      unify(chain, elab(st.rhs), st.rhs->span, "a proof step");
      if (st.rel != Rel::Eq && st.rel != Rel::Ne)
        unify(chain, SType::int_(), st.rhs->span, "an ordered proof step");
      for (auto& j : st.justs) elab_just(j, st.span);
    }
    zonk_expr(p.start);
    for (auto& st : p.steps) {
      zonk_expr(st.rhs);
      for (auto& j : st.justs)
        if (!j.is_lemma_ref) zonk_expr(j.expr);
    }
    p.free_vars.clear();
    collect_free_vars(frees, p.span, p.free_vars);
    free_scope_ = nullptr;
  }

  void elab_just(Justification& j, Span span) {
    if (j.expr->kind == ExprKind::Var && !lookup_local(j.expr->name) &&
        !free_scope_->count(j.expr->name) && goals_.count(j.expr->name)) {
      const GoalDecl* lemma = goals_.at(j.expr->name);
      if (!lemma->hyps.empty() || !lemma->free_vars.empty())
        sort_fail(span, "lemma '" + j.expr->name +
                            "' has hypotheses or free variables; write the "
                            "instance formula explicitly");
      j.is_lemma_ref = true;
      j.lemma = j.expr->name;
      j.expr = mk_binop_expr(j.span, rel_binop(lemma->rel), lemma->lhs,
                             lemma->rhs);
      j.expr->stype = SType::bool_();
      return;
    }
    unify(elab(j.expr), SType::bool_(), j.span, "a justification");
  }
};

}  // namespace

Program sort_check(Program p, std::vector<std::string>* warnings) {
  Checker c;
  return c.run(std::move(p), warnings);
}

// ---------------------------------------------------------------------------
// Printer

namespace {

// Precedence contexts, loosest to tightest. Greedy constructs (if, case,
// lambda) print at level 0 and get parenthesized anywhere else, which keeps
// reparsing unambiguous.
constexpr int kImp = 0, kOr = 1, kAnd = 2, kCmp = 3, kAdd = 4, kMul = 5,
              kUnary = 6, kApp = 7, kAtom = 8;

void pr(std::ostream& os, const Expr& e, int ctx);

void paren(std::ostream& os, const Expr& e, int own, int ctx,
           const std::function<void()>& body) {
  bool need = own < ctx;
  (void)e;
  if (need) os << "(";
  body();
  if (need) os << ")";
}

int binop_level(BinOpKind k) {
  switch (k) {
    case BinOpKind::Imp: return kImp;
    case BinOpKind::Or: return kOr;
    case BinOpKind::And: return kAnd;
    case BinOpKind::Eq: case BinOpKind::Ne: case BinOpKind::Le:
    case BinOpKind::Lt: case BinOpKind::Ge: case BinOpKind::Gt:
      return kCmp;
    case BinOpKind::Add: case BinOpKind::Sub: return kAdd;
    case BinOpKind::Mul: return kMul;
  }
  return kAtom;
}

const char* binop_text(BinOpKind k) {
  switch (k) {
    case BinOpKind::Imp: return "=>";
    case BinOpKind::Or: return "||";
    case BinOpKind::And: return "&&";
    case BinOpKind::Eq: return "=";
    case BinOpKind::Ne: return "/=";
    case BinOpKind::Le: return "<=";
    case BinOpKind::Lt: return "<";
    case BinOpKind::Ge: return ">=";
    case BinOpKind::Gt: return ">";
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
  }
  return "?";
}

void pr_binop(std::ostream& os, const Expr& e, int ctx) {
  int own = binop_level(e.bop);
  paren(os, e, own, ctx, [&] {
    int lctx = own, rctx = own;
    switch (own) {
      case kImp: case kOr: case kAnd:
        lctx = own + 1;  // right-associative
        break;
      case kCmp:
        lctx = rctx = kAdd;  // non-associative
        break;
      case kAdd: case kMul:
        rctx = own + 1;  // left-associative
        break;
      default: break;
    }
    pr(os, *e.args[0], lctx);
    os << " " << binop_text(e.bop) << " ";
    pr(os, *e.args[1], rctx);
  });
}

void pr(std::ostream& os, const Expr& e, int ctx) {
  switch (e.kind) {
    case ExprKind::IntLit:
      if (e.ival < 0) {
        paren(os, e, kUnary, ctx, [&] { os << e.ival.str(); });
      } else {
        os << e.ival.str();
      }
      return;
    case ExprKind::BoolLit:
      os << (e.bval ? "True" : "False");
      return;
    case ExprKind::Var:
      os << e.name;
      return;
    case ExprKind::Con:
      if (e.args.empty()) {
        os << e.name;
        return;
      }
      paren(os, e, kApp, ctx, [&] {
        os << e.name;
        for (const auto& a : e.args) {
          os << " ";
          pr(os, *a, kAtom);
        }
      });
      return;
    case ExprKind::App:
      paren(os, e, kApp, ctx, [&] {
        pr(os, *e.args[0], kAtom);
        for (size_t i = 1; i < e.args.size(); ++i) {
          os << " ";
          pr(os, *e.args[i], kAtom);
        }
      });
      return;
    case ExprKind::Lam:
      paren(os, e, kImp, ctx, [&] {
        os << "\\";
        if (e.annot)
          os << "(" << e.name << " : " << e.annot->str() << ")";
        else
          os << e.name;
        os << " -> ";
        pr(os, *e.args[0], kImp);
      });
      return;
    case ExprKind::Ite:
      paren(os, e, kImp, ctx, [&] {
        os << "if ";
        pr(os, *e.args[0], kImp);
        os << " then ";
        pr(os, *e.args[1], kImp);
        os << " else ";
        pr(os, *e.args[2], kImp);
      });
      return;
    case ExprKind::Case:
      paren(os, e, kImp, ctx, [&] {
        os << "case ";
        pr(os, *e.args[0], kImp);
        os << " of { ";
        bool first = true;
        for (const auto& a : e.alts) {
          if (!first) os << " ; ";
          first = false;
          if (a.wildcard) {
            os << "_";
          } else {
            os << a.con;
            for (const auto& b : a.binders) os << " " << b;
          }
          os << " -> ";
          pr(os, *a.body, kImp);
        }
        os << " }";
      });
      return;
    case ExprKind::BinOp:
      pr_binop(os, e, ctx);
      return;
    case ExprKind::UnOp:
      paren(os, e, kUnary, ctx, [&] {
        os << "not ";
        pr(os, *e.args[0], kUnary);
      });
      return;
  }
}

void pr_sort_atom(std::ostream& os, const SType& t) {
  if (t.is_fun())
    os << "(" << t.str() << ")";
  else
    os << t.str();
}

void pr_justs(std::ostream& os, const std::vector<Justification>& js) {
  os << " ∵ [";
  bool first = true;
  for (const auto& j : js) {
    if (!first) os << ", ";
    first = false;
    if (j.is_lemma_ref)
      os << j.lemma;
    else
      pr(os, *j.expr, kImp);
  }
  os << "]";
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  pr(os, e, kImp);
  return os.str();
}

std::string print_stype(const SType& t) { return t.str(); }

std::string print_program(const Program& p) {
  std::ostringstream os;
  bool first = true;
  auto gap = [&] {
    if (!first) os << "\n";
    first = false;
  };
  for (const auto& d : p.datatypes) {
    gap();
    os << "data " << d.name << " =";
    bool fc = true;
    for (const auto& c : d.cons) {
      os << (fc ? " " : " | ") << c.name;
      fc = false;
      for (const auto& f : c.fields) {
        os << " ";
        pr_sort_atom(os, f);
      }
    }
    os << "\n";
  }
  for (const auto& d : p.defs) {
    gap();
    os << "reflect " << d.name;
    for (const auto& [pn, ps] : d.params)
      os << " (" << pn << " : " << ps.str() << ")";
    os << " : " << d.ret.str();
    if (!d.metric.empty()) {
      os << " / [";
      for (size_t i = 0; i < d.metric.size(); ++i) {
        if (i) os << ", ";
        os << print_expr(*d.metric[i]);
      }
      os << "]";
    }
    os << " =\n  " << print_expr(*d.body) << "\n";
  }
  for (const auto& g : p.goals) {
    gap();
    os << "goal " << g.name << " "
       << (g.mode == GoalMode::Ple ? "ple" : "script") << ":";
    if (g.hyps.empty()) {
      os << " ";
    } else {
      os << "\n";
      for (const auto& h : g.hyps)
        os << "  hypothesis " << print_expr(*h) << ";\n";
      os << "  ";
    }
    std::ostringstream lhs;
    pr(lhs, *g.lhs, kAdd);
    os << lhs.str() << " " << rel_text(g.rel) << " " << print_expr(*g.rhs)
       << "\n";
  }
  for (const auto& pr_ : p.proofs) {
    gap();
    os << "proof " << pr_.name << " : " << pr_.goal << " {\n";
    os << "  " << print_expr(*pr_.start) << "\n";
    for (const auto& st : pr_.steps) {
      os << "  ";
      if (st.ext)
        os << "=*.";
      else
        os << rel_text(st.rel) << ".";
      os << " " << print_expr(*st.rhs);
      if (!st.justs.empty()) pr_justs(os, st.justs);
      os << "\n";
    }
    os << "  ** QED\n}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural equality (spans and inferred annotations ignored)

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::IntLit:
      return a->ival == b->ival;
    case ExprKind::BoolLit:
      return a->bval == b->bval;
    case ExprKind::Var:
    case ExprKind::Con:
    case ExprKind::Lam:
      if (a->name != b->name) return false;
      break;
    case ExprKind::BinOp:
      if (a->bop != b->bop) return false;
      break;
    case ExprKind::UnOp:
      if (a->uop != b->uop) return false;
      break;
    default:
      break;
  }
  if (a->kind == ExprKind::Lam &&
      (a->annot.has_value() != b->annot.has_value() ||
       (a->annot && *a->annot != *b->annot)))
    return false;
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!same_expr(a->args[i], b->args[i])) return false;
  if (a->alts.size() != b->alts.size()) return false;
  for (size_t i = 0; i < a->alts.size(); ++i) {
    const CaseAlt& x = a->alts[i];
    const CaseAlt& y = b->alts[i];
    if (x.wildcard != y.wildcard || x.con != y.con || x.binders != y.binders ||
        !same_expr(x.body, y.body))
      return false;
  }
  return true;
}

bool same_program(const Program& a, const Program& b) {
  if (a.datatypes.size() != b.datatypes.size() ||
      a.defs.size() != b.defs.size() || a.goals.size() != b.goals.size() ||
      a.proofs.size() != b.proofs.size())
    return false;
  for (size_t i = 0; i < a.datatypes.size(); ++i) {
    const auto& x = a.datatypes[i];
    const auto& y = b.datatypes[i];
    if (x.name != y.name || x.cons.size() != y.cons.size()) return false;
    for (size_t j = 0; j < x.cons.size(); ++j) {
      if (x.cons[j].name != y.cons[j].name ||
          x.cons[j].fields != y.cons[j].fields)
        return false;
    }
  }
  for (size_t i = 0; i < a.defs.size(); ++i) {
    const auto& x = a.defs[i];
    const auto& y = b.defs[i];
    if (x.name != y.name || x.params != y.params || x.ret != y.ret ||
        x.metric.size() != y.metric.size() || !same_expr(x.body, y.body))
      return false;
    for (size_t j = 0; j < x.metric.size(); ++j)
      if (!same_expr(x.metric[j], y.metric[j])) return false;
  }
  for (size_t i = 0; i < a.goals.size(); ++i) {
    const auto& x = a.goals[i];
    const auto& y = b.goals[i];
    if (x.name != y.name || x.mode != y.mode || x.rel != y.rel ||
        x.hyps.size() != y.hyps.size() || !same_expr(x.lhs, y.lhs) ||
        !same_expr(x.rhs, y.rhs))
      return false;
    for (size_t j = 0; j < x.hyps.size(); ++j)
      if (!same_expr(x.hyps[j], y.hyps[j])) return false;
  }
  for (size_t i = 0; i < a.proofs.size(); ++i) {
    const auto& x = a.proofs[i];
    const auto& y = b.proofs[i];
    if (x.name != y.name || x.goal != y.goal || !same_expr(x.start, y.start) ||
        x.steps.size() != y.steps.size())
      return false;
    for (size_t j = 0; j < x.steps.size(); ++j) {
      const auto& s = x.steps[j];
      const auto& t = y.steps[j];
      if (s.rel != t.rel || s.ext != t.ext || !same_expr(s.rhs, t.rhs) ||
          s.justs.size() != t.justs.size())
        return false;
      for (size_t k = 0; k < s.justs.size(); ++k) {
        if (s.justs[k].is_lemma_ref != t.justs[k].is_lemma_ref) return false;
        if (s.justs[k].is_lemma_ref) {
          if (s.justs[k].lemma != t.justs[k].lemma) return false;
        } else if (!same_expr(s.justs[k].expr, t.justs[k].expr)) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace ple::surface
