#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ple/errors.hpp"
#include "ple/sorts.hpp"

namespace ple {

using Int = boost::multiprecision::cpp_int;

enum class TermKind {
  IntLit,
  BoolLit,
  Var,
  ConApp,   // datatype constructor application (possibly nullary)
  FunApp,   // fully applied first-order symbol (defined fn / checker / selector)
  BinOp,
  UnOp,
  Ite,
  ULam,     // defunctionalized lambda over pooled binder indices
  UApp,     // application of a non-symbol (higher-order position)
};

enum class BinOpKind { Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, And, Or, Imp };
enum class UnOpKind { Not };

bool binop_is_cmp(BinOpKind k);
bool binop_is_bool(BinOpKind k);   // And/Or/Imp
bool binop_is_arith(BinOpKind k);  // Add/Sub/Mul
const char* binop_name(BinOpKind k);

class Term;

struct TermNode {
  TermKind kind;
  Sort sort;
  Int ival;                 // IntLit
  bool bval = false;        // BoolLit
  std::string name;         // Var / ConApp / FunApp
  BinOpKind bop{};          // BinOp
  UnOpKind uop{};           // UnOp
  int binder = 0;           // ULam pool index
  std::vector<Term> args;   // children (ULam: [body]; Ite: [c,t,e]; ...)
  size_t hash = 0;
};

// Immutable shared term. Structural equality with hash short-circuit.
class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}

  bool valid() const { return node_ != nullptr; }
  const TermNode& n() const { return *node_; }
  TermKind kind() const { return node_->kind; }
  Sort sort() const { return node_->sort; }
  size_t hash() const { return node_->hash; }
  const std::vector<Term>& args() const { return node_->args; }

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }

  bool is_bool_lit(bool v) const {
    return valid() && kind() == TermKind::BoolLit && node_->bval == v;
  }

  std::string str() const;  // deterministic printer (diagnostics, traces)

 private:
  std::shared_ptr<const TermNode> node_;
};

struct TermHash {
  size_t operator()(const Term& t) const { return t.hash(); }
};

// Builders. Every builder sort-checks its arguments and throws SortError on
// mismatch; malformed terms cannot be constructed.
Term mk_int(const Int& v);
Term mk_bool(bool v);
Term mk_var(const std::string& name, Sort s);
Term mk_con(const std::string& con, std::vector<Term> args);
Term mk_fun(const std::string& fn, std::vector<Term> args, Sort ret);
Term mk_binop(BinOpKind op, Term a, Term b);
Term mk_not(Term a);
Term mk_ite(Term c, Term t, Term e);
Term mk_ulam(int binder, Term body, Sort argsort);
Term mk_uapp(Term f, Term a);

Term mk_and(Term a, Term b);
Term mk_eq(Term a, Term b);
Term mk_conj(const std::vector<Term>& ts);  // true for empty

// Pooled lambda binders: one variable pool per argument sort, identified by
// (sort, index). Names are reserved (start with '%').
Term pool_var(Sort s, int index);
std::optional<int> pool_var_index(const Term& t);
bool is_pool_var(const Term& t);
// Max ULam binder index and pool-var index occurring anywhere in t (0 if none).
int max_lambda_index(const Term& t);
// Max ULam binder index alone, ignoring pool-var references (0 if none).
int max_ulam_binder(const Term& t);
// Pool invariant check: every nested ULam index is strictly below binder.
bool lambda_index_ok(const Term& t, int binder);
bool contains_ulam(const Term& t);

// Total deterministic order on terms (used to orient equalities in dedup
// keys and to keep iteration orders stable).
int term_compare(const Term& a, const Term& b);

// Guard-normal-form definition: branch guards are Ite- and ULam-free bool
// terms, mutually exclusive and exhaustive by construction.
struct Branch {
  Term guard;
  Term body;
};

struct GuardedDef {
  std::string name;
  std::vector<std::pair<std::string, Sort>> params;
  Sort ret;
  std::vector<Branch> branches;
};

struct ConstructorField {
  Sort sort;
  std::string datatype;  // nonempty when sort is Univ: the field's datatype
};

struct Constructor {
  std::string name;
  std::vector<ConstructorField> fields;
  std::string datatype;
  std::string checker;                 // is_<Con>
  std::vector<std::string> selectors;  // sel_<Con>_<i>, 1-based
};

struct Datatype {
  std::string name;
  std::vector<std::string> constructors;  // declaration order
};

// Named definitions plus registered datatypes.
class DefEnv {
 public:
  void add_def(GuardedDef d);
  const GuardedDef* find(const std::string& name) const;
  const std::vector<std::string>& def_order() const { return def_order_; }

  void add_datatype(const Datatype& dt, const std::vector<Constructor>& cons);
  const Datatype* find_datatype(const std::string& name) const;
  const Constructor* find_constructor(const std::string& name) const;
  const Constructor* checker_of(const std::string& fn) const;
  // Returns (constructor, 0-based field index) when fn is a selector.
  std::optional<std::pair<const Constructor*, int>> selector_of(
      const std::string& fn) const;
  const std::vector<std::string>& datatype_order() const { return dt_order_; }
  bool has_datatypes() const { return !dt_order_.empty(); }

 private:
  std::unordered_map<std::string, GuardedDef> defs_;
  std::vector<std::string> def_order_;
  std::unordered_map<std::string, Datatype> datatypes_;
  std::vector<std::string> dt_order_;
  std::unordered_map<std::string, Constructor> constructors_;
  std::unordered_map<std::string, std::string> checker_to_con_;
  std::unordered_map<std::string, std::pair<std::string, int>> selector_to_con_;
};

// Hypothesis set with set semantics over normalized keys and deterministic
// insertion-order iteration. Stored terms keep their source form.
class LogicalEnv {
 public:
  LogicalEnv() = default;

  // Returns true when the hypothesis was new.
  bool insert(const Term& t);
  bool contains(const Term& t) const;
  bool subset_of(const LogicalEnv& other) const;
  size_t size() const { return items_.size(); }
  const std::vector<Term>& items() const { return items_; }
  std::vector<Term>::const_iterator begin() const { return items_.begin(); }
  std::vector<Term>::const_iterator end() const { return items_.end(); }

 private:
  std::vector<Term> items_;
  std::unordered_set<Term, TermHash> keys_;
};

// Canonical dedup key: conjunctions flattened (left-nested rebuild),
// =/≠ operands oriented by the total term order. The stored hypothesis
// keeps its source orientation; normalize is idempotent.
Term normalize(const Term& t);

// Capture-free simultaneous substitution of variables by terms. ULam binders
// are renamed when a replacement would capture or break the pool-index
// invariant. Sort mismatches raise SortError.
Term substitute(const Term& t,
                const std::unordered_map<std::string, Term>& subst);

// Every fully applied occurrence f(ē) with f defined in env, including
// occurrences nested inside other collected applications. First-occurrence
// (pre-order, left-to-right) order, structurally deduplicated.
std::vector<Term> collect_apps(const Term& t, const DefEnv& env);
std::vector<Term> collect_apps(const std::vector<Term>& ts, const DefEnv& env);

// Bottom-up ground simplification: literal arithmetic/comparison/boolean
// folding, checker-on-constructor, selector-on-constructor, Ite on literal
// condition, x = x. Sound in every model; used on engine-generated terms.
Term fold_ground(const Term& t, const DefEnv& env);

}  // namespace ple
