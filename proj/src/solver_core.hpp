#pragma once

// Internal solver machinery shared by smt.cpp, cc.cpp, simplex.cpp and the
// SMT-LIB server. Not installed; see include/ple/smt.hpp for the API.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ple/terms.hpp"

namespace ple {
namespace solver {

using Rat = boost::multiprecision::cpp_rational;

enum class NodeKind { True, False, Var, Con, Fun, ULam, UApp, Lin };

// Canonical integer linear form over atom node ids: k + sum coeff*node.
struct LinForm {
  Rat k;
  std::vector<std::pair<int, Rat>> terms;  // sorted by node id, coeff != 0

  bool is_const() const { return terms.empty(); }
  bool operator==(const LinForm& o) const {
    return k == o.k && terms == o.terms;
  }
  std::string key() const;
};

LinForm lin_add(const LinForm& a, const LinForm& b);
LinForm lin_sub(const LinForm& a, const LinForm& b);
LinForm lin_scale(const LinForm& a, const Rat& c);

struct Node {
  NodeKind kind;
  Sort sort;
  std::string name;        // Var / Con / Fun
  int binder = 0;          // ULam
  std::vector<int> args;   // children node ids (Lin: atom ids of form)
  LinForm lin;             // Lin only
};

// Interning context for one solver invocation. Node ids are stable; new
// nodes may be appended mid-solve (checker instantiation), never removed.
class Context {
 public:
  Context(const DefEnv& env);

  const DefEnv& env;
  std::vector<Node> nodes;

  int true_node() const { return 0; }
  int false_node() const { return 1; }

  int mk_var(const std::string& name, Sort s);
  int mk_con(const std::string& name, std::vector<int> args);
  int mk_fun(const std::string& name, std::vector<int> args, Sort s);
  int mk_ulam(int binder, int body, Sort s);
  int mk_uapp(int f, int a, Sort s);
  int mk_lin(const LinForm& f);  // collapses 1*atom+0 to the atom itself

  // Linear view of an Int-sorted node.
  LinForm lin_of(int n) const;

  // Term -> node. Bool-sorted connective subterms are NOT handled here
  // (the formula layer owns them); callers pass only atomic sides.
  bool is_int_atom(int n) const;

  const std::vector<int>& parents(int n) const;
  void add_parent_edges(int n);

  std::string node_str(int n) const;

 private:
  int intern(Node n);
  std::unordered_map<std::string, int> table_;
  std::vector<std::vector<int>> parents_;
  std::string node_key(const Node& n) const;
};

// ---- Congruence closure with ADT rules -----------------------------------

struct CC {
  explicit CC(Context& ctx);

  Context& ctx;
  bool conflict = false;
  std::string conflict_why;

  void merge(int a, int b);
  void add_diseq(int a, int b);
  // Runs congruence + ADT rules to fixpoint; false on conflict.
  bool propagate();

  int find(int a);
  bool same(int a, int b) { return find(a) == find(b); }

  // Representative constructor member of a class, -1 if none.
  int con_member(int rep);
  const std::vector<int>& members(int rep);

  // All current classes containing >= 2 distinct Int-sorted nodes, as the
  // list of (first, other) pairs; used for the LIA exchange.
  std::vector<std::pair<int, int>> int_class_pairs();

  bool acyclic();  // constructor-argument graph over classes

 private:
  void grow();
  int find_(int a);
  bool merge_roots(int ra, int rb);
  bool sweep_rules();
  std::vector<int> uf_;
  std::vector<std::vector<int>> members_;
  std::vector<std::pair<int, int>> diseqs_;
  std::deque<std::pair<int, int>> pending_;
  std::unordered_set<std::string> instantiated_;  // (classRep,Con) keys
};

// ---- Simplex over exact rationals -----------------------------------------

// Bounded-variable simplex (assert bounds on linear forms; feasibility via
// Bland pivoting; optimization for entailment probing; branch&bound for
// integrality). Variables are context atom ids plus internal slack ids.
class Simplex {
 public:
  explicit Simplex(int64_t* budget);

  // Returns false on immediately detected conflict.
  bool assert_le(const LinForm& f);   // f <= 0
  bool assert_eq(const LinForm& f);   // f == 0

  bool check();  // feasibility over rationals

  // max of f over the feasible region; nullopt when unbounded.
  std::optional<Rat> maximize(const LinForm& f);

  // Entailment probe: does the current constraint set force f == 0?
  bool entails_zero(const LinForm& f);

  Rat value(int atom) const;      // current model value of an atom node
  std::vector<int> atom_vars() const;  // atom node ids known to the tableau

  // Branch & bound to an all-integer model of the atom vars.
  // 1 = integral model found, 0 = infeasible over ints, -1 = budget out.
  int integerize(int depth, int* nodes);

  bool out_of_budget() const { return *budget_ <= 0; }

 private:
  struct Var {
    std::optional<Rat> lb, ub;
    Rat beta;
    bool basic = false;
    int row = -1;  // basic: row index
  };
  int var_of_atom(int atom);
  int slack_of(const std::vector<std::pair<int, Rat>>& terms);
  bool add_upper(int v, const Rat& b);
  bool add_lower(int v, const Rat& b);
  void pivot(int basic_row, int nonbasic);
  void update_nonbasic(int v, const Rat& nv);
  bool fix_basics();

  int64_t* budget_;
  std::vector<Var> vars_;
  std::unordered_map<int, int> atom_to_var_;
  std::vector<int> var_to_atom_;
  std::unordered_map<std::string, int> slack_table_;
  // rows_[i]: basic var b_i = sum coeff * var  (over nonbasic vars)
  std::vector<int> row_basic_;
  std::vector<std::map<int, Rat>> rows_;
};

}  // namespace solver
}  // namespace ple
