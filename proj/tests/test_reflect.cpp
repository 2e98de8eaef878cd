#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "ple/reflect.hpp"
#include "ple/errors.hpp"
#include "ple/smt.hpp"
#include "ple/surface.hpp"

using namespace ple;
using reflect::Scope;

namespace {

const char* kFib = R"(
reflect fib (n : Int) : Int =
  if n = 0 then 0 else if n = 1 then 1 else fib (n - 1) + fib (n - 2)
)";

const char* kList = R"(
data List = Nil | Cons Int List

reflect append (xs : List) (ys : List) : List =
  case xs of { Nil -> ys ; Cons h t -> Cons h (append t ys) }
)";

const char* kSwap = R"(
data List = Nil | Cons Int List

reflect swap (xs : List) : List =
  case xs of {
    Cons x1 t1 ->
      case t1 of {
        Cons x2 rest ->
          if x1 > x2 then Cons x2 (Cons x1 rest) else Cons x1 (Cons x2 rest) ;
        _ -> xs } ;
    _ -> xs }
)";

reflect::Module reflected(const std::string& text) {
  return reflect::reflect_program(surface::sort_check(surface::parse_program(text)));
}

Sort I() { return Sort::int_(); }
Sort B() { return Sort::bool_(); }
Sort U() { return Sort::univ(); }

Term iv(long v) { return mk_int(Int(v)); }
Term fib_at(Term a) { return mk_fun("fib", {a}, I()); }

}  // namespace

TEST_CASE("fib reflects to three guard-normal branches") {
  reflect::Module m = reflected(kFib);
  const GuardedDef* d = m.env.find("fib");
  REQUIRE(d != nullptr);
  REQUIRE(d->params.size() == 1);
  CHECK(d->params[0].first == "n");
  CHECK(d->params[0].second == I());
  CHECK(d->ret == I());
  REQUIRE(d->branches.size() == 3);

  Term n = mk_var("n", I());
  Term g1 = mk_eq(n, iv(0));
  Term g2 = mk_eq(n, iv(1));
  CHECK(d->branches[0].guard == g1);
  CHECK(d->branches[0].body == iv(0));
  CHECK(d->branches[1].guard == mk_and(mk_not(g1), g2));
  CHECK(d->branches[1].body == iv(1));
  CHECK(d->branches[2].guard == mk_and(mk_not(g1), mk_not(g2)));
  CHECK(d->branches[2].body ==
        mk_binop(BinOpKind::Add, fib_at(mk_binop(BinOpKind::Sub, n, iv(1))),
                 fib_at(mk_binop(BinOpKind::Sub, n, iv(2)))));
}

TEST_CASE("append embeds case into checker/selector ite") {
  surface::Program p = surface::sort_check(surface::parse_program(kList));
  DefEnv env;
  reflect::declare_datatype(env, p.datatypes[0]);

  Term xs = mk_var("xs", U());
  Term ys = mk_var("ys", U());
  Scope sc{{"xs", xs}, {"ys", ys}};
  Term body = reflect::embed_expr(env, p.defs[0].body, sc);

  Term want = mk_ite(
      mk_fun("is_Nil", {xs}, B()), ys,
      mk_con("Cons", {mk_fun("sel_Cons_1", {xs}, I()),
                      mk_fun("append",
                             {mk_fun("sel_Cons_2", {xs}, U()), ys}, U())}));
  CHECK(body == want);

  // def_if keys the two branches on the checker.
  std::vector<Branch> brs = reflect::def_if(body);
  REQUIRE(brs.size() == 2);
  CHECK(brs[0].guard == mk_fun("is_Nil", {xs}, B()));
  CHECK(brs[0].body == ys);
  CHECK(brs[1].guard == mk_not(mk_fun("is_Nil", {xs}, B())));
}

TEST_CASE("swap merges equal-body fallthroughs into three branches") {
  reflect::Module m = reflected(kSwap);
  const GuardedDef* d = m.env.find("swap");
  REQUIRE(d != nullptr);
  REQUIRE(d->branches.size() == 3);

  Term xs = mk_var("xs", U());
  Term c1 = mk_fun("is_Cons", {xs}, B());
  Term c2 = mk_fun("is_Cons", {mk_fun("sel_Cons_2", {xs}, U())}, B());
  // Fallthrough: both non-cons-cons paths share the body xs, so their
  // guards are disjoined.
  CHECK(d->branches[2].guard ==
        mk_binop(BinOpKind::Or, mk_and(c1, mk_not(c2)), mk_not(c1)));
  CHECK(d->branches[2].body == xs);
  // The two cons-cons branches split on the comparison.
  Term x1 = mk_fun("sel_Cons_1", {xs}, I());
  Term x2 = mk_fun("sel_Cons_1", {mk_fun("sel_Cons_2", {xs}, U())}, I());
  Term gt = mk_binop(BinOpKind::Gt, x1, x2);
  CHECK(d->branches[0].guard == mk_and(mk_and(c1, c2), gt));
  CHECK(d->branches[1].guard == mk_and(mk_and(c1, c2), mk_not(gt)));
  CHECK(d->branches[0].body != d->branches[1].body);
}

TEST_CASE("ite-free bodies give a single true-guarded branch") {
  reflect::Module m = reflected("reflect seven (u : Int) : Int = 7");
  const GuardedDef* d = m.env.find("seven");
  REQUIRE(d != nullptr);
  REQUIRE(d->branches.size() == 1);
  CHECK(d->branches[0].guard == mk_bool(true));
  CHECK(d->branches[0].body == iv(7));
}

TEST_CASE("nullary definitions embed as empty-argument applications") {
  reflect::Module m = reflected(
      "reflect base : Int = 3\n"
      "reflect usebase (n : Int) : Int = n + base");
  const GuardedDef* d = m.env.find("usebase");
  REQUIRE(d != nullptr);
  CHECK(d->branches[0].body ==
        mk_binop(BinOpKind::Add, mk_var("n", I()), mk_fun("base", {}, I())));
}

TEST_CASE("identity lambda becomes the first pool binder") {
  reflect::Module m = reflected("goal lamid ple: (\\x -> x) 0 = 0");
  REQUIRE(m.goals.size() == 1);
  CHECK(m.goals[0].lhs == mk_uapp(mk_ulam(1, pool_var(I(), 1), I()), iv(0)));
  CHECK(m.goals[0].rhs == iv(0));
}

TEST_CASE("nested lambdas get descending pool indices with capture intact") {
  reflect::Module m =
      reflected("goal nest ple: (\\x -> (\\y -> x + y) 1) 2 = 3");
  Term inner = mk_ulam(
      1, mk_binop(BinOpKind::Add, pool_var(I(), 2), pool_var(I(), 1)), I());
  Term outer = mk_ulam(2, mk_uapp(inner, iv(1)), I());
  CHECK(m.goals[0].lhs == mk_uapp(outer, iv(2)));
}

TEST_CASE("application of a lambda-bound function variable becomes UApp") {
  reflect::Module m = reflected("goal hof ple: (\\f -> f 1) g = 0");
  Sort F = Sort::fun(I(), I());
  Term lam = mk_ulam(1, mk_uapp(pool_var(F, 1), iv(1)), F);
  CHECK(m.goals[0].lhs == mk_uapp(lam, mk_var("g", F)));
  REQUIRE(m.goals[0].frees.size() == 1);
  CHECK(m.goals[0].frees[0].name == "g");
  CHECK(m.goals[0].frees[0].sort == F);
  CHECK(m.goals[0].frees[0].datatype.empty());
}

TEST_CASE("embedding is compositional over operators") {
  reflect::Module m = reflected("goal comp ple: a + b * 2 = 0 - a");
  Term a = mk_var("a", I());
  Term b = mk_var("b", I());
  CHECK(m.goals[0].lhs ==
        mk_binop(BinOpKind::Add, a, mk_binop(BinOpKind::Mul, b, iv(2))));
  CHECK(m.goals[0].rhs == mk_binop(BinOpKind::Sub, iv(0), a));

  reflect::Module m2 =
      reflected("goal comp2 ple: hypothesis not (x = 1); x + 0 = x");
  Term x = mk_var("x", I());
  REQUIRE(m2.goals[0].hyps.size() == 1);
  CHECK(m2.goals[0].hyps[0] == mk_not(mk_eq(x, iv(1))));
}

TEST_CASE("wildcard case arm becomes the final else") {
  reflect::Module m = reflected(
      "data List = Nil | Cons Int List\n"
      "reflect isnil (xs : List) : Bool =\n"
      "  case xs of { Nil -> True ; _ -> False }");
  const GuardedDef* d = m.env.find("isnil");
  REQUIRE(d != nullptr);
  REQUIRE(d->branches.size() == 2);
  Term xs = mk_var("xs", U());
  CHECK(d->branches[0].guard == mk_fun("is_Nil", {xs}, B()));
  CHECK(d->branches[0].body == mk_bool(true));
  CHECK(d->branches[1].body == mk_bool(false));
  bool no_undef_warning =
      m.warnings.empty() || m.warnings[0].find("undef_") == std::string::npos;
  CHECK(no_undef_warning);
}

TEST_CASE("partial case completes with an uninterpreted constant") {
  surface::Program p = surface::sort_check(surface::parse_program(kList));
  DefEnv env;
  reflect::declare_datatype(env, p.datatypes[0]);

  // Hand-built (bypasses the checker's exhaustiveness rule):
  //   case xs of { Nil -> 0 }
  surface::ExprPtr scrut = surface::mk_varref({}, "xs");
  scrut->stype = surface::SType::data("List");
  surface::CaseAlt alt;
  alt.con = "Nil";
  alt.body = surface::mk_intlit({}, Int(0));
  alt.body->stype = surface::SType::int_();
  surface::ExprPtr c = surface::mk_case({}, scrut, {alt});
  c->stype = surface::SType::int_();

  Scope sc{{"xs", mk_var("xs", U())}};
  std::vector<std::string> warns;
  Term t = reflect::embed_expr(env, c, sc, &warns, "len");
  Term want = mk_ite(mk_fun("is_Nil", {mk_var("xs", U())}, B()), iv(0),
                     mk_fun("undef_len", {}, I()));
  CHECK(t == want);
  REQUIRE(warns.size() == 1);
  CHECK(warns[0].find("undef_len") != std::string::npos);
  CHECK(warns[0].find("Cons") != std::string::npos);
}

TEST_CASE("ite under a lambda is rejected with a hoisting fix-it") {
  surface::Program p = surface::sort_check(surface::parse_program(
      "reflect bad (b : Bool) : Int = (\\x -> if b then x else 0) 1"));
  DefEnv env;
  CHECK_THROWS_WITH_AS(reflect::reflect_function(env, p.defs[0]),
                       doctest::Contains("hoist"), ReflectError);
}

TEST_CASE("lambda left in a reflected branch is rejected") {
  surface::Program p = surface::sort_check(surface::parse_program(
      "reflect twice (f : Int -> Int) (n : Int) : Int = f (f n)\n"
      "reflect bad2 (n : Int) : Int = twice (\\x -> x + 1) n"));
  DefEnv env;
  GuardedDef tw = reflect::reflect_function(env, p.defs[0]);
  // Higher-order parameters embed as UApp chains and are fine.
  Term f = mk_var("f", Sort::fun(I(), I()));
  Term n = mk_var("n", I());
  CHECK(tw.branches[0].body == mk_uapp(f, mk_uapp(f, n)));
  CHECK_THROWS_WITH_AS(reflect::reflect_function(env, p.defs[1]),
                       doctest::Contains("hoist the lambda"), ReflectError);
}

TEST_CASE("declared datatypes expose checkers and selectors to the solver") {
  surface::Program p = surface::sort_check(surface::parse_program(kList));
  DefEnv env;
  reflect::declare_datatype(env, p.datatypes[0]);

  const Constructor* cons = env.find_constructor("Cons");
  REQUIRE(cons != nullptr);
  CHECK(cons->checker == "is_Cons");
  REQUIRE(cons->selectors.size() == 2);
  CHECK(cons->selectors[0] == "sel_Cons_1");
  CHECK(cons->selectors[1] == "sel_Cons_2");
  CHECK(cons->fields[0].sort == I());
  CHECK(cons->fields[1].sort == U());
  CHECK(cons->fields[1].datatype == "List");
  REQUIRE(env.find_datatype("List") != nullptr);
  CHECK(env.find_datatype("List")->constructors ==
        std::vector<std::string>{"Nil", "Cons"});

  Term nil = mk_con("Nil", {});
  Term c3 = mk_con("Cons", {iv(3), nil});
  LogicalEnv empty;
  CHECK(is_valid(env, empty, mk_eq(mk_fun("is_Nil", {nil}, B()), mk_bool(true)))
            .is_valid());
  CHECK(is_valid(env, empty, mk_eq(mk_fun("is_Nil", {c3}, B()), mk_bool(false)))
            .is_valid());
  CHECK(is_valid(env, empty, mk_eq(mk_fun("sel_Cons_1", {c3}, I()), iv(3)))
            .is_valid());

  Term x = mk_var("x", I());
  Term xs = mk_var("xs", U());
  CHECK(is_valid(env, empty,
                 mk_binop(BinOpKind::Ne, mk_con("Cons", {x, xs}), nil))
            .is_valid());

  Term y = mk_var("y", I());
  Term ys = mk_var("ys", U());
  LogicalEnv hyps;
  hyps.insert(mk_eq(mk_con("Cons", {x, xs}), mk_con("Cons", {y, ys})));
  CHECK(is_valid(env, hyps, mk_eq(x, y)).is_valid());
}

TEST_CASE("reflected guards are mutually exclusive and exhaustive") {
  for (const char* text : {kFib, kList, kSwap}) {
    reflect::Module m = reflected(text);
    LogicalEnv empty;
    for (const std::string& fname : m.env.def_order()) {
      const GuardedDef* d = m.env.find(fname);
      REQUIRE(d != nullptr);
      std::vector<Term> gs;
      for (const Branch& b : d->branches) gs.push_back(b.guard);
      for (size_t i = 0; i < gs.size(); i++)
        for (size_t j = i + 1; j < gs.size(); j++) {
          CAPTURE(fname);
          CHECK(is_valid(m.env, empty, mk_not(mk_and(gs[i], gs[j])))
                    .is_valid());
        }
      Term any = gs[0];
      for (size_t i = 1; i < gs.size(); i++)
        any = mk_binop(BinOpKind::Or, any, gs[i]);
      CHECK(is_valid(m.env, empty, any).is_valid());
    }
  }
}

TEST_CASE("whole programs reflect to env, goals, and proof scripts") {
  const char* text = R"(
data List = Nil | Cons Int List

reflect fib (n : Int) : Int =
  if n = 0 then 0 else if n = 1 then 1 else fib (n - 1) + fib (n - 2)

goal fib2 ple: hypothesis n = 2; fib n = 1
goal fib1 ple: fib 1 = 1
goal sg script: fib 2 = 1

proof pf : sg {
  fib 2
  =. fib 1 + fib 0 ∵ [fib1]
  =. 1
  ** QED
}
)";
  reflect::Module m = reflected(text);
  CHECK(m.env.find("fib") != nullptr);
  REQUIRE(m.goals.size() == 3);

  Term n = mk_var("n", I());
  CHECK(m.goals[0].name == "fib2");
  CHECK(m.goals[0].mode == surface::GoalMode::Ple);
  REQUIRE(m.goals[0].hyps.size() == 1);
  CHECK(m.goals[0].hyps[0] == mk_eq(n, iv(2)));
  CHECK(m.goals[0].lhs == fib_at(n));
  CHECK(m.goals[0].rhs == iv(1));
  REQUIRE(m.goals[0].frees.size() == 1);
  CHECK(m.goals[0].frees[0].name == "n");
  CHECK(m.goals[0].frees[0].sort == I());
  CHECK(reflect::rel_term(m.goals[0].rel, m.goals[0].lhs, m.goals[0].rhs) ==
        mk_eq(fib_at(n), iv(1)));

  CHECK(m.goals[2].mode == surface::GoalMode::Script);

  REQUIRE(m.proofs.size() == 1);
  const reflect::EmbeddedProof& pf = m.proofs[0];
  CHECK(pf.name == "pf");
  CHECK(pf.goal == "sg");
  CHECK(pf.start == fib_at(iv(2)));
  REQUIRE(pf.steps.size() == 2);
  CHECK(pf.steps[0].rel == surface::Rel::Eq);
  CHECK_FALSE(pf.steps[0].ext);
  CHECK(pf.steps[0].rhs ==
        mk_binop(BinOpKind::Add, fib_at(iv(1)), fib_at(iv(0))));
  REQUIRE(pf.steps[0].justs.size() == 1);
  CHECK(pf.steps[0].justs[0] == mk_eq(fib_at(iv(1)), iv(1)));
  CHECK(pf.steps[1].rhs == iv(1));
  CHECK(pf.steps[1].justs.empty());
}
