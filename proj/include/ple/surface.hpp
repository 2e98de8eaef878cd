#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ple/errors.hpp"
#include "ple/sorts.hpp"
#include "ple/terms.hpp"

// Surface language (.ple files): datatype declarations, reflected function
// definitions, goals, and equational proof blocks. The concrete grammar is
// documented in the README; parsing and sort checking are pure functions.

namespace ple::surface {

struct Span {
  int line = 0;
  int col = 0;
};

// Surface sorts keep datatypes apart; they collapse to the core Sort
// (every datatype -> Univ) only at embedding time. Meta sorts exist during
// inference and never survive sort_check.
enum class STypeKind { Int, Bool, Data, Fun, Meta };

class SType {
 public:
  SType() = default;

  static SType int_();
  static SType bool_();
  static SType data(const std::string& name);
  static SType fun(SType arg, SType res);
  static SType meta(int id);

  bool valid() const { return node_ != nullptr; }
  STypeKind kind() const { return node_->kind; }
  const std::string& data_name() const { return node_->name; }
  SType arg() const { return SType(node_->arg); }
  SType res() const { return SType(node_->res); }
  int meta_id() const { return node_->meta; }

  bool is_int() const { return kind() == STypeKind::Int; }
  bool is_bool() const { return kind() == STypeKind::Bool; }
  bool is_data() const { return kind() == STypeKind::Data; }
  bool is_fun() const { return kind() == STypeKind::Fun; }
  bool is_meta() const { return kind() == STypeKind::Meta; }

  bool operator==(const SType& o) const;
  bool operator!=(const SType& o) const { return !(*this == o); }

  std::string str() const;
  Sort core() const;  // requires meta-free

 private:
  struct Node {
    STypeKind kind;
    std::string name;  // Data
    std::shared_ptr<const Node> arg, res;
    int meta = -1;
  };
  explicit SType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

enum class ExprKind {
  IntLit,
  BoolLit,
  Var,
  Con,   // constructor application (possibly nullary)
  App,   // juxtaposition: args[0] is the head, rest are arguments
  Lam,
  Ite,
  Case,
  BinOp,
  UnOp,
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct CaseAlt {
  Span span;
  bool wildcard = false;
  std::string con;                   // empty for wildcard
  std::vector<std::string> binders;  // pattern variables, linear
  ExprPtr body;
};

struct Expr {
  ExprKind kind;
  Span span;
  Int ival;                    // IntLit
  bool bval = false;           // BoolLit
  std::string name;            // Var / Con / Lam binder
  BinOpKind bop{};             // BinOp
  UnOpKind uop{};              // UnOp
  std::optional<SType> annot;  // Lam binder annotation, if written
  std::vector<ExprPtr> args;   // children (App: head first; Lam: [body];
                               //  Ite: [c,t,e]; Case: [scrutinee])
  std::vector<CaseAlt> alts;   // Case alternatives, source order
  SType stype;                 // filled by sort_check
  bool def_call = false;       // App head names a reflected def, fully applied
};

ExprPtr mk_intlit(Span s, const Int& v);
ExprPtr mk_boollit(Span s, bool v);
ExprPtr mk_varref(Span s, const std::string& name);
ExprPtr mk_conapp(Span s, const std::string& con, std::vector<ExprPtr> args);
ExprPtr mk_app(Span s, ExprPtr head, std::vector<ExprPtr> args);
ExprPtr mk_lam(Span s, const std::string& binder, std::optional<SType> annot,
               ExprPtr body);
ExprPtr mk_ite_expr(Span s, ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr mk_case(Span s, ExprPtr scrut, std::vector<CaseAlt> alts);
ExprPtr mk_binop_expr(Span s, BinOpKind op, ExprPtr a, ExprPtr b);
ExprPtr mk_unop_expr(Span s, UnOpKind op, ExprPtr a);

struct DataDecl {
  struct Con {
    Span span;
    std::string name;
    std::vector<SType> fields;
  };
  Span span;
  std::string name;
  std::vector<Con> cons;
};

struct ReflectDef {
  Span span;
  std::string name;
  std::vector<std::pair<std::string, SType>> params;
  SType ret;
  std::vector<ExprPtr> metric;  // "/ [e1, ...]": parsed, never used
  ExprPtr body;
};

enum class GoalMode { Ple, Script };
enum class Rel { Eq, Ne, Le, Lt, Ge, Gt };

BinOpKind rel_binop(Rel r);
const char* rel_text(Rel r);

struct GoalDecl {
  Span span;
  std::string name;  // auto-assigned goal<N> when omitted in source
  GoalMode mode;
  std::vector<ExprPtr> hyps;
  Rel rel{};
  ExprPtr lhs, rhs;
  // Free variables with inferred sorts, name-sorted; filled by sort_check.
  std::vector<std::pair<std::string, SType>> free_vars;
};

struct Justification {
  Span span;
  bool is_lemma_ref = false;
  std::string lemma;  // goal name when is_lemma_ref
  ExprPtr expr;       // the Bool formula (synthesized for lemma refs)
};

struct ProofStep {
  Span span;
  Rel rel{};
  bool ext = false;  // the =*. extensionality step, discharged as assumed
  ExprPtr rhs;
  std::vector<Justification> justs;
};

struct ProofDecl {
  Span span;
  std::string name;
  std::string goal;  // referenced goal (mode script)
  ExprPtr start;
  std::vector<ProofStep> steps;
  // Free variables of the whole script (including the goal's), filled by
  // sort_check; shared names denote the same variable as in the goal.
  std::vector<std::pair<std::string, SType>> free_vars;
};

struct Program {
  std::vector<DataDecl> datatypes;
  std::vector<ReflectDef> defs;
  std::vector<GoalDecl> goals;
  std::vector<ProofDecl> proofs;
};

// Parses one translation unit. Total: returns a Program or throws ParseError
// with line/column. No name resolution beyond syntax.
Program parse_program(const std::string& text);

// Monomorphic sort inference and checking; returns the elaborated Program
// (every Expr carries a resolved SType). Registers nothing globally.
// Throws SortError (diagnostics carry line/column in the message) and
// ParseError for structural name errors (duplicates, unknown constructor).
// Appends human-readable warnings (e.g. the trusted-totality banner) when
// `warnings` is non-null.
Program sort_check(Program p, std::vector<std::string>* warnings = nullptr);

// Deterministic pretty-printer; parse(print(p)) == p modulo spans for
// elaborated programs.
std::string print_program(const Program& p);
std::string print_expr(const Expr& e);
std::string print_stype(const SType& t);

// Structural equality ignoring spans (and inferred annotations that the
// printer re-derives). Used by round-trip tests.
bool same_expr(const ExprPtr& a, const ExprPtr& b);
bool same_program(const Program& a, const Program& b);

}  // namespace ple::surface
