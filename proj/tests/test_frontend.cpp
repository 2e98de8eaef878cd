#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <sstream>

#include "doctest.h"
#include "ple/errors.hpp"
#include "ple/surface.hpp"

using namespace ple;
using namespace ple::surface;

namespace {

const char* kFib =
    "reflect fib (n : Int) : Int =\n"
    "  if n = 0 then 0 else if n = 1 then 1 else fib (n - 1) + fib (n - 2)\n";

const char* kList =
    "data List = Nil | Cons Int List\n"
    "reflect append (xs : List) (ys : List) : List =\n"
    "  case xs of { Nil -> ys ; Cons h t -> Cons h (append t ys) }\n";

Program check_text(const std::string& text,
                   std::vector<std::string>* warnings = nullptr) {
  return sort_check(parse_program(text), warnings);
}

}  // namespace

TEST_CASE("fib definition parses to one reflected def of arity 1") {
  Program p = check_text(kFib);
  REQUIRE(p.defs.size() == 1);
  CHECK(p.defs[0].name == "fib");
  CHECK(p.defs[0].params.size() == 1);
  CHECK(p.defs[0].params[0].first == "n");
  CHECK(p.defs[0].params[0].second == SType::int_());
  CHECK(p.defs[0].ret == SType::int_());
  REQUIRE(p.defs[0].body->kind == ExprKind::Ite);
  CHECK(p.defs[0].body->stype == SType::int_());
  // else branch is the nested if
  CHECK(p.defs[0].body->args[2]->kind == ExprKind::Ite);
  CHECK(p.goals.empty());
  CHECK(p.datatypes.empty());
}

TEST_CASE("empty file parses to the empty program") {
  Program p = check_text("");
  CHECK(p.datatypes.empty());
  CHECK(p.defs.empty());
  CHECK(p.goals.empty());
  CHECK(p.proofs.empty());
  Program p2 = check_text("-- only a comment\n");
  CHECK(p2.defs.empty());
}

TEST_CASE("unnamed ple goal gets mode, relation and an auto name") {
  Program p = check_text(std::string(kFib) + "goal ple: fib 2 = 1\n");
  REQUIRE(p.goals.size() == 1);
  const GoalDecl& g = p.goals[0];
  CHECK(g.mode == GoalMode::Ple);
  CHECK(g.rel == Rel::Eq);
  CHECK(g.name == "goal1");
  CHECK(g.hyps.empty());
  REQUIRE(g.lhs->kind == ExprKind::App);
  CHECK(g.lhs->def_call);
  CHECK(g.lhs->args[0]->name == "fib");
  CHECK(g.lhs->args[1]->ival == 2);
  CHECK(g.rhs->kind == ExprKind::IntLit);
  CHECK(g.free_vars.empty());
}

TEST_CASE("fib applied to True is a sort error") {
  CHECK_THROWS_AS(check_text(std::string(kFib) + "goal ple: fib True = 1\n"),
                  SortError);
}

TEST_CASE("list append over a declared datatype elaborates") {
  Program p = check_text(kList);
  REQUIRE(p.datatypes.size() == 1);
  CHECK(p.datatypes[0].cons.size() == 2);
  CHECK(p.datatypes[0].cons[1].fields.size() == 2);
  CHECK(p.datatypes[0].cons[1].fields[1] == SType::data("List"));
  REQUIRE(p.defs.size() == 1);
  const ReflectDef& d = p.defs[0];
  CHECK(d.params[0].second == SType::data("List"));
  CHECK(d.params[0].second.core() == Sort::univ());
  CHECK(d.body->stype == SType::data("List"));
  // the Cons alternative body
  const CaseAlt& alt = d.body->alts[1];
  CHECK(alt.con == "Cons");
  CHECK(alt.binders == std::vector<std::string>{"h", "t"});
  CHECK(alt.body->stype.core() == Sort::univ());
}

TEST_CASE("goal hypotheses and free variables (pos example shape)") {
  std::string text =
      "reflect pos (n : Int) : Int =\n"
      "  if n > 0 then 1 + pos (n - 1) else 0\n"
      "goal posUnfold ple:\n"
      "  hypothesis y > 5;\n"
      "  pos y = 3 + pos (y - 3)\n";
  Program p = check_text(text);
  REQUIRE(p.goals.size() == 1);
  const GoalDecl& g = p.goals[0];
  CHECK(g.name == "posUnfold");
  REQUIRE(g.hyps.size() == 1);
  CHECK(g.hyps[0]->stype == SType::bool_());
  REQUIRE(g.free_vars.size() == 1);
  CHECK(g.free_vars[0].first == "y");
  CHECK(g.free_vars[0].second == SType::int_());
}

TEST_CASE("termination metric is parsed, kept and warned about") {
  std::vector<std::string> warnings;
  std::string text =
      "reflect dec (n : Int) : Int / [n] = if n > 0 then dec (n - 1) else 0\n";
  Program p = check_text(text, &warnings);
  REQUIRE(p.defs[0].metric.size() == 1);
  CHECK(p.defs[0].metric[0]->kind == ExprKind::Var);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("totality") != std::string::npos);
}

TEST_CASE("name errors are ParseError with positions") {
  // duplicate definition
  CHECK_THROWS_AS(check_text(std::string(kFib) + kFib), ParseError);
  // unknown constructor
  CHECK_THROWS_AS(check_text("goal ple: Cons 1 Nil = Nil\n"), ParseError);
  // duplicate constructor
  CHECK_THROWS_AS(check_text("data A = C\ndata B = C\n"), ParseError);
  // duplicate goal name
  CHECK_THROWS_AS(
      check_text("goal g ple: 1 = 1\ngoal g ple: 2 = 2\n"), ParseError);
  // proof for unknown goal
  CHECK_THROWS_AS(check_text("proof p : nope { 1 =. 1 ** QED }\n"),
                  ParseError);
  // proof for a ple-mode goal
  CHECK_THROWS_AS(
      check_text("goal g ple: 1 = 1\nproof p : g { 1 =. 1 ** QED }\n"),
      ParseError);
  // unknown datatype in a signature
  CHECK_THROWS_AS(check_text("reflect f (x : Foo) : Int = 0\n"), ParseError);
  // diagnostics carry positions
  try {
    check_text("reflect f (x : Int) : Int = y\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("sort errors: unbound variables, case shape, ambiguity") {
  // unbound variable in a def body
  CHECK_THROWS_AS(check_text("reflect f (x : Int) : Int = y\n"), SortError);
  // non-exhaustive case without wildcard
  CHECK_THROWS_AS(
      check_text("data L = N | C Int L\n"
                 "reflect f (x : L) : Int = case x of { N -> 0 }\n"),
      SortError);
  // wildcard completes it
  CHECK_NOTHROW(
      check_text("data L = N | C Int L\n"
                 "reflect f (x : L) : Int = case x of { N -> 0 ; _ -> 1 }\n"));
  // alternatives after a wildcard are unreachable
  CHECK_THROWS_AS(
      check_text("data L = N | C Int L\n"
                 "reflect f (x : L) : Int = case x of { _ -> 1 ; N -> 0 }\n"),
      SortError);
  // pattern arity
  CHECK_THROWS_AS(
      check_text("data L = N | C Int L\n"
                 "reflect f (x : L) : Int = case x of { N -> 0 ; C h -> h }\n"),
      SortError);
  // nonlinear pattern
  CHECK_THROWS_AS(check_text(
                      "data P = MkP Int Int\n"
                      "reflect f (x : P) : Int = case x of { MkP a a -> a }\n"),
                  SortError);
  // ambiguous goal variable sort
  CHECK_THROWS_AS(check_text("goal ple: x = y\n"), SortError);
  // reserved name prefixes
  CHECK_THROWS_AS(check_text("reflect is_zero (n : Int) : Bool = n = 0\n"),
                  SortError);
}

TEST_CASE("nonlinear multiplication is rejected at sort checking") {
  CHECK_THROWS_AS(
      check_text("reflect f (x : Int) (y : Int) : Int = x * y\n"), SortError);
  CHECK_NOTHROW(check_text("reflect f (x : Int) : Int = 2 * x\n"));
  CHECK_NOTHROW(check_text("reflect f (x : Int) : Int = x * -3\n"));
}

TEST_CASE("reflected functions must be fully applied") {
  std::string hof =
      "data List = Nil | Cons Int List\n"
      "reflect map (f : Int -> Int) (xs : List) : List =\n"
      "  case xs of { Nil -> Nil ; Cons h t -> Cons (f h) (map f t) }\n";
  Program p = check_text(hof);
  CHECK(p.defs[0].params[0].second ==
        SType::fun(SType::int_(), SType::int_()));
  // passing a def where a function value is expected
  CHECK_THROWS_AS(
      check_text(hof + kFib + "goal ple: map fib Nil = Nil\n"), SortError);
  // a lambda is the supported spelling
  CHECK_NOTHROW(
      check_text(hof + kFib + "goal ple: map (\\x -> fib x) Nil = Nil\n"));
  // partial application
  CHECK_THROWS_AS(check_text("reflect add (a : Int) (b : Int) : Int = a + b\n"
                             "goal ple: add 1 = 1\n"),
                  SortError);
}

TEST_CASE("defs returning functions support over-application") {
  std::string text =
      "reflect twice (f : Int -> Int) : Int -> Int = \\x -> f (f x)\n"
      "goal g ple: twice (\\x -> x + 1) 0 = 2\n";
  Program p = check_text(text);
  const GoalDecl& g = p.goals[0];
  // node was split: outer application of the saturated call
  REQUIRE(g.lhs->kind == ExprKind::App);
  CHECK_FALSE(g.lhs->def_call);
  CHECK(g.lhs->args[0]->kind == ExprKind::App);
  CHECK(g.lhs->args[0]->def_call);
  CHECK(g.lhs->stype == SType::int_());
}

TEST_CASE("nullary definitions are rewritten to calls") {
  Program p = check_text("reflect k : Int = 7\ngoal g ple: k = 7\n");
  const GoalDecl& g = p.goals[0];
  REQUIRE(g.lhs->kind == ExprKind::App);
  CHECK(g.lhs->def_call);
  CHECK(g.lhs->args.size() == 1);
  CHECK(g.lhs->args[0]->name == "k");
}

TEST_CASE("proof scripts parse with steps, justifications and QED") {
  std::string text = std::string(kFib) +
                     "goal fib2_1 ple: fib 2 = 1\n"
                     "goal fib3_2 script: fib 3 = 2\n"
                     "proof pf : fib3_2 {\n"
                     "  fib 3\n"
                     "  =. fib 2 + fib 1\n"
                     "  =. 2 \xE2\x88\xB5 [fib2_1, fib 1 = 1]\n"
                     "  ** QED\n"
                     "}\n";
  Program p = check_text(text);
  REQUIRE(p.proofs.size() == 1);
  const ProofDecl& pr = p.proofs[0];
  CHECK(pr.goal == "fib3_2");
  REQUIRE(pr.steps.size() == 2);
  CHECK(pr.steps[0].rel == Rel::Eq);
  CHECK(pr.steps[0].justs.empty());
  REQUIRE(pr.steps[1].justs.size() == 2);
  CHECK(pr.steps[1].justs[0].is_lemma_ref);
  CHECK(pr.steps[1].justs[0].lemma == "fib2_1");
  // the resolved lemma formula is its statement
  CHECK(pr.steps[1].justs[0].expr->bop == BinOpKind::Eq);
  CHECK_FALSE(pr.steps[1].justs[1].is_lemma_ref);
  CHECK(pr.steps[1].justs[1].expr->stype == SType::bool_());
}

TEST_CASE("lemma references require closed hypothesis-free goals") {
  std::string text = std::string(kFib) +
                     "goal lemma_open ple: fib y = fib y\n"
                     "goal t script: fib 0 = 0\n"
                     "proof pf : t { fib 0 =. 0 \xE2\x88\xB5 lemma_open ** QED }\n";
  CHECK_THROWS_AS(check_text(text), SortError);
}

TEST_CASE("extensionality steps parse as assumed equality links") {
  std::string text =
      "goal ext script:\n"
      "  hypothesis f 0 = g 0 + 1;\n"
      "  f = g\n"
      "proof pf : ext { f =*. g ** QED }\n";
  Program p = check_text(text);
  REQUIRE(p.proofs[0].steps.size() == 1);
  CHECK(p.proofs[0].steps[0].ext);
  CHECK(p.proofs[0].steps[0].rel == Rel::Eq);
  // f and g were inferred as functions
  bool saw_fun = false;
  for (const auto& [n, s] : p.goals[0].free_vars)
    if (s.is_fun()) saw_fun = true;
  CHECK(saw_fun);
}

TEST_CASE("dotted comparison steps need Int chains") {
  std::string ok =
      "goal g script: 1 <= 3\n"
      "proof p : g { 1 <=. 2 <=. 3 ** QED }\n";
  CHECK_NOTHROW(check_text(ok));
  std::string bad =
      "data L = N\n"
      "goal g script: N = N\n"
      "proof p : g { N <=. N ** QED }\n";
  CHECK_THROWS_AS(check_text(bad), SortError);
}

TEST_CASE("parse errors carry positions and messages") {
  try {
    parse_program("goal ple: 1 +\n");
    CHECK(false);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("expected") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_program("reflect f (x : Int) : Int = x +\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_program("goal ple: 1 = 2 = 3\n"), ParseError);
  CHECK_THROWS_AS(parse_program("data lower = C\n"), ParseError);
  CHECK_THROWS_AS(parse_program("goal ple: 1 & 2\n"), ParseError);
  CHECK_THROWS_AS(parse_program("proof p : g { 1 ** QED }\n"), ParseError);
  CHECK_THROWS_AS(parse_program("goal ple: (if a then 1 else 2 = 3\n"),
                  ParseError);
  // goals must state a relation
  CHECK_THROWS_AS(parse_program("goal ple: True\n"), ParseError);
}

TEST_CASE("operator precedence and unary minus") {
  Program p = check_text(
      "goal g1 ple: 1 + 2 * 3 = 7\n"
      "goal g2 ple:\n"
      "  hypothesis a && b || c;\n"
      "  x - -5 = x + 5\n"
      "goal g3 ple:\n"
      "  hypothesis not a && b;\n"
      "  0 - x = -1 * x\n");
  // 1 + (2 * 3)
  const ExprPtr& lhs = p.goals[0].lhs;
  CHECK(lhs->bop == BinOpKind::Add);
  CHECK(lhs->args[1]->bop == BinOpKind::Mul);
  // (a && b) || c
  const ExprPtr& h = p.goals[1].hyps[0];
  CHECK(h->bop == BinOpKind::Or);
  CHECK(h->args[0]->bop == BinOpKind::And);
  // x - (-5): literal folding
  CHECK(p.goals[1].lhs->args[1]->kind == ExprKind::IntLit);
  CHECK(p.goals[1].lhs->args[1]->ival == -5);
  // not binds tighter than &&
  const ExprPtr& h3 = p.goals[2].hyps[0];
  CHECK(h3->bop == BinOpKind::And);
  CHECK(h3->args[0]->kind == ExprKind::UnOp);
  // unary minus on a variable desugars to 0 - x
  CHECK(p.goals[2].rhs->args[0]->kind == ExprKind::IntLit);
}

TEST_CASE("arbitrary precision integer literals") {
  Program p = check_text(
      "goal g ple: 123456789012345678901234567890 + 1 = "
      "123456789012345678901234567891\n");
  CHECK(p.goals[0].lhs->args[0]->ival == Int("123456789012345678901234567890"));
  std::string printed = print_program(p);
  Program p2 = check_text(printed);
  CHECK(same_program(p, p2));
}

TEST_CASE("printer output is stable on the fib program") {
  Program p = check_text(std::string(kFib) + "goal fib2 ple: fib 2 = 1\n");
  std::string expected =
      "reflect fib (n : Int) : Int =\n"
      "  if n = 0 then 0 else if n = 1 then 1 else fib (n - 1) + fib (n - 2)"
      "\n\ngoal fib2 ple: fib 2 = 1\n";
  CHECK(print_program(p) == expected);
}

TEST_CASE("round trip on hand-written corner cases") {
  std::vector<std::string> texts = {
      std::string(kFib) + "goal ple: fib 2 = 1\n",
      kList,
      "data L = N | C Int L\n"
      "reflect f (x : L) : Int = case x of { N -> 0 ; _ -> 1 }\n"
      "goal g ple: f N = 0\n",
      "goal g ple: (1 + (if True then 2 else 3)) * 2 = 6\n",
      "goal g ple: (\\x -> x + 1) 4 = 5\n",
      "reflect g (f : Int -> Int) (n : Int) : Int = f (f n)\n"
      "goal t ple: g (\\(y : Int) -> y - -3) 0 = 6\n",
      "goal g ple:\n  hypothesis (a = 1) = c;\n  1 = 1\n",
      "goal g ple:\n  hypothesis a => b => a;\n  2 - 1 - 1 = 0\n",
      std::string(kFib) +
          "goal fib2_1 ple: fib 2 = 1\n"
          "goal fib3_2 script: fib 3 = 2\n"
          "proof pf : fib3_2 {\n  fib 3\n  =. fib 2 + fib 1\n"
          "  =. 2 \xE2\x88\xB5 [fib2_1]\n  ** QED\n}\n",
  };
  for (const auto& text : texts) {
    CAPTURE(text);
    Program p1 = check_text(text);
    std::string s1 = print_program(p1);
    Program p2 = check_text(s1);
    CHECK(same_program(p1, p2));
    CHECK(print_program(p2) == s1);
  }
}

// ---------------------------------------------------------------------------
// Randomized round-trip: parse . print == id on elaborated programs.

namespace {

struct Gen {
  std::mt19937_64 rng;
  int uniq = 0;
  // vars in scope, by sort bucket
  std::vector<std::string> ints, bools, lists, funs;
  bool allow_new_vars = true;
  bool has_defs = false;

  explicit Gen(uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin() { return pick(2) == 0; }
  Span sp() { return Span{}; }

  std::string var_of(std::vector<std::string>& bucket, const char* prefix) {
    if (!bucket.empty() && (!allow_new_vars || !coin()))
      return bucket[pick((int)bucket.size())];
    if (!allow_new_vars && bucket.empty()) return "";
    std::string n = std::string(prefix) + std::to_string(uniq++);
    bucket.push_back(n);
    return n;
  }

  // Free variables may only be reached through sort-neutral contexts
  // (equality sides, if-branches); pin every one of them down so the
  // generated program is never sort-ambiguous.
  void ground_vars(GoalDecl& g) {
    for (const auto& v : ints)
      g.hyps.push_back(mk_binop_expr(sp(), BinOpKind::Le, mk_varref(sp(), v),
                                     mk_intlit(sp(), Int(999))));
    for (const auto& v : bools)
      g.hyps.push_back(mk_binop_expr(sp(), BinOpKind::Or, mk_varref(sp(), v),
                                     mk_boollit(sp(), true)));
    for (const auto& v : lists)
      g.hyps.push_back(mk_binop_expr(sp(), BinOpKind::Eq, mk_varref(sp(), v),
                                     mk_conapp(sp(), "Nil", {})));
  }

  ExprPtr gen_int(int d) {
    if (d <= 0) {
      if (coin()) return mk_intlit(sp(), Int(pick(41) - 20));
      std::string v = var_of(ints, "i");
      if (v.empty()) return mk_intlit(sp(), Int(pick(41) - 20));
      return mk_varref(sp(), v);
    }
    switch (pick(has_defs ? 7 : 5)) {
      case 0:
        return mk_binop_expr(sp(), coin() ? BinOpKind::Add : BinOpKind::Sub,
                             gen_int(d - 1), gen_int(d - 1));
      case 1:
        return mk_binop_expr(sp(), BinOpKind::Mul,
                             mk_intlit(sp(), Int(pick(7) - 3)), gen_int(d - 1));
      case 2:
        return mk_ite_expr(sp(), gen_bool(d - 1), gen_int(d - 1),
                           gen_int(d - 1));
      case 3: {
        // case over a list
        std::vector<CaseAlt> alts;
        CaseAlt nil;
        nil.con = "Nil";
        nil.body = gen_int(d - 1);
        alts.push_back(nil);
        CaseAlt cons;
        std::string h = "h" + std::to_string(uniq++);
        std::string t = "t" + std::to_string(uniq++);
        if (coin()) {
          cons.con = "Cons";
          cons.binders = {h, t};
          ints.push_back(h);
          lists.push_back(t);
          cons.body = gen_int(d - 1);
          ints.pop_back();
          lists.pop_back();
        } else {
          cons.wildcard = true;
          cons.body = gen_int(d - 1);
        }
        alts.push_back(cons);
        return mk_case(sp(), gen_list(d - 1), std::move(alts));
      }
      case 4:
        if (!funs.empty())
          return mk_app(sp(), mk_varref(sp(), funs[pick((int)funs.size())]),
                        {gen_int(d - 1)});
        return gen_int(0);
      case 5:
        return mk_app(sp(), mk_varref(sp(), "fb"), {gen_int(d - 1)});
      default:
        return mk_app(sp(), mk_varref(sp(), "len"), {gen_list(d - 1)});
    }
  }

  ExprPtr gen_bool(int d) {
    if (d <= 0) {
      if (coin()) return mk_boollit(sp(), coin());
      std::string v = var_of(bools, "b");
      if (v.empty()) return mk_boollit(sp(), coin());
      return mk_varref(sp(), v);
    }
    switch (pick(5)) {
      case 0: {
        BinOpKind ops[] = {BinOpKind::Eq, BinOpKind::Ne, BinOpKind::Le,
                           BinOpKind::Lt, BinOpKind::Ge, BinOpKind::Gt};
        return mk_binop_expr(sp(), ops[pick(6)], gen_int(d - 1),
                             gen_int(d - 1));
      }
      case 1: {
        BinOpKind ops[] = {BinOpKind::And, BinOpKind::Or, BinOpKind::Imp};
        return mk_binop_expr(sp(), ops[pick(3)], gen_bool(d - 1),
                             gen_bool(d - 1));
      }
      case 2:
        return mk_unop_expr(sp(), UnOpKind::Not, gen_bool(d - 1));
      case 3:
        // keep one side constructor-rooted so the sides are never two
        // unconstrained variables
        return mk_binop_expr(
            sp(), coin() ? BinOpKind::Eq : BinOpKind::Ne,
            mk_conapp(sp(), "Cons", {gen_int(d - 1), gen_list(d - 1)}),
            gen_list(d - 1));
      default:
        return gen_bool(0);
    }
  }

  ExprPtr gen_list(int d) {
    if (d <= 0) {
      if (coin()) return mk_conapp(sp(), "Nil", {});
      std::string v = var_of(lists, "l");
      if (v.empty()) return mk_conapp(sp(), "Nil", {});
      return mk_varref(sp(), v);
    }
    switch (pick(has_defs ? 4 : 3)) {
      case 0:
        return mk_conapp(sp(), "Cons", {gen_int(d - 1), gen_list(d - 1)});
      case 1:
        return mk_ite_expr(sp(), gen_bool(d - 1), gen_list(d - 1),
                           gen_list(d - 1));
      case 2:
        return gen_list(0);
      default:
        return mk_app(sp(), mk_varref(sp(), "app"),
                      {gen_list(d - 1), gen_list(d - 1)});
    }
  }

  ExprPtr gen_lam_int() {
    std::string x = "v" + std::to_string(uniq++);
    ints.push_back(x);
    ExprPtr body = gen_int(1);
    ints.pop_back();
    return mk_lam(sp(), x, std::nullopt, body);
  }

  Program gen_program() {
    Program p;
    DataDecl dd;
    dd.name = "List";
    DataDecl::Con nil{Span{}, "Nil", {}};
    DataDecl::Con cons{Span{}, "Cons", {SType::int_(), SType::data("List")}};
    dd.cons = {nil, cons};
    p.datatypes.push_back(dd);

    // fixed signatures, random bodies (validity of bodies is all we need)
    has_defs = false;
    {
      ReflectDef d;
      d.name = "fb";
      d.params = {{"n", SType::int_()}};
      d.ret = SType::int_();
      ints = {"n"};
      bools.clear();
      lists.clear();
      funs.clear();
      allow_new_vars = false;
      d.body = gen_int(2);
      if (coin()) d.metric.push_back(mk_varref(sp(), "n"));
      p.defs.push_back(d);
    }
    {
      ReflectDef d;
      d.name = "len";
      d.params = {{"xs", SType::data("List")}};
      d.ret = SType::int_();
      ints.clear();
      lists = {"xs"};
      d.body = gen_int(2);
      p.defs.push_back(d);
    }
    has_defs = true;
    {
      ReflectDef d;
      d.name = "app";
      d.params = {{"xs", SType::data("List")}, {"ys", SType::data("List")}};
      d.ret = SType::data("List");
      ints.clear();
      lists = {"xs", "ys"};
      d.body = gen_list(2);
      p.defs.push_back(d);
    }
    {
      ReflectDef d;
      d.name = "hof";
      d.params = {{"f", SType::fun(SType::int_(), SType::int_())},
                  {"n", SType::int_()}};
      d.ret = SType::int_();
      ints = {"n"};
      lists.clear();
      funs = {"f"};
      d.body = gen_int(2);
      p.defs.push_back(d);
    }
    funs.clear();

    // a closed lemma for references
    {
      GoalDecl g;
      g.name = "lem0";
      g.mode = GoalMode::Ple;
      g.rel = Rel::Eq;
      allow_new_vars = false;
      ints.clear();
      bools.clear();
      lists.clear();
      g.lhs = gen_int(1);
      g.rhs = gen_int(1);
      p.goals.push_back(g);
    }

    allow_new_vars = true;
    int ngoals = 1 + pick(3);
    for (int i = 0; i < ngoals; ++i) {
      GoalDecl g;
      g.name = "g" + std::to_string(i);
      g.mode = GoalMode::Ple;
      ints.clear();
      bools.clear();
      lists.clear();
      int nh = pick(3);
      for (int h = 0; h < nh; ++h) g.hyps.push_back(gen_bool(2));
      Rel rels[] = {Rel::Eq, Rel::Ne, Rel::Le, Rel::Lt, Rel::Ge, Rel::Gt};
      g.rel = rels[pick(6)];
      if (g.rel == Rel::Eq && coin()) {
        g.lhs = gen_list(2);
        g.rhs = gen_list(2);
      } else {
        // include a lambda through the HO def sometimes
        g.lhs = coin() ? mk_app(sp(), mk_varref(sp(), "hof"),
                                {gen_lam_int(), gen_int(1)})
                       : gen_int(2);
        g.rhs = gen_int(2);
      }
      ground_vars(g);
      p.goals.push_back(g);
    }

    // one script goal with a proof
    {
      GoalDecl g;
      g.name = "sg";
      g.mode = GoalMode::Script;
      ints.clear();
      bools.clear();
      lists.clear();
      g.rel = Rel::Eq;
      g.lhs = gen_int(2);
      g.rhs = gen_int(2);
      ground_vars(g);
      p.goals.push_back(g);

      ProofDecl pr;
      pr.name = "sg_pf";
      pr.goal = "sg";
      pr.start = p.goals.back().lhs;
      // proofs have no hypothesis list to ground fresh variables with, so
      // steps draw only on the goal's variables
      allow_new_vars = false;
      int nsteps = 1 + pick(3);
      for (int s = 0; s < nsteps; ++s) {
        ProofStep st;
        st.rel = Rel::Eq;
        st.rhs = gen_int(2);
        int nj = pick(3);
        for (int j = 0; j < nj; ++j) {
          Justification ju;
          if (coin()) {
            ju.expr = mk_varref(sp(), "lem0");
          } else {
            ju.expr = gen_bool(2);
          }
          st.justs.push_back(ju);
        }
        pr.steps.push_back(st);
      }
      p.proofs.push_back(pr);
    }
    return p;
  }
};

}  // namespace

TEST_CASE("parse after print is the identity on 200 random programs") {
  std::mt19937_64 seeds(20240818);
  for (int i = 0; i < 200; ++i) {
    Gen gen(seeds());
    Program p0 = gen.gen_program();
    std::string raw = print_program(p0);
    CAPTURE(i);
    CAPTURE(raw);
    Program p1;
    try {
      p1 = sort_check(std::move(p0));
    } catch (const Error& e) {
      MESSAGE("sort_check threw: " << e.what() << "\nprogram:\n" << raw);
      CHECK(false);
      continue;
    }
    std::string s1 = print_program(p1);
    CAPTURE(s1);
    Program p2 = sort_check(parse_program(s1));
    CHECK(same_program(p1, p2));
    CHECK(print_program(p2) == s1);
  }
}
