#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ple/reflect.hpp"
#include "ple/surface.hpp"
#include "ple/terms.hpp"

// Concrete call-by-value interpreter over elaborated surface expressions and
// over logic terms, plus satisfying-store sampling. This is the soundness
// oracle connecting the logical and concrete semantics.

namespace ple::interp {

struct Closure;

struct Value {
  enum class Kind { Int, Bool, Con, Fun };
  Kind kind = Kind::Int;
  Int i;
  bool b = false;
  std::string con;
  std::vector<Value> fields;
  std::shared_ptr<const Closure> fun;

  static Value of_int(Int v);
  static Value of_bool(bool v);
  static Value of_con(std::string c, std::vector<Value> fs);
  static Value of_fun(std::shared_ptr<const Closure> c);

  bool is_int() const { return kind == Kind::Int; }
  bool is_bool() const { return kind == Kind::Bool; }
  bool is_con() const { return kind == Kind::Con; }
  bool is_fun() const { return kind == Kind::Fun; }
};

// Structural equality; comparing function values is an error.
bool value_eq(const Value& a, const Value& b);
std::string value_str(const Value& v);

using Store = std::unordered_map<std::string, Value>;

// A function value: exactly one of tbody (term lambda) or ebody (surface
// lambda) is set; env captures the definition environment.
struct Closure {
  std::string param;
  Term tbody;
  surface::ExprPtr ebody;
  Store env;
};

inline constexpr int64_t kDefaultFuel = 1'000'000;

// CBV evaluation of an elaborated surface expression; defs resolves
// reflected definition calls. Throws EvalError on fuel exhaustion (totality
// is an input contract), unmatched cases, or ill-sorted values.
Value eval_expr(const surface::Program& defs, const Store& store,
                const surface::ExprPtr& e, int64_t fuel = kDefaultFuel);

// CBV evaluation of a logic term; env resolves reflected definitions (first
// true guard's branch), checkers, and selectors.
Value eval_term(const DefEnv& env, const Store& store, const Term& t,
                int64_t fuel = kDefaultFuel);

// Random well-sorted value: zipf-like integers over a range that widens
// with the attempt number, size-bounded constructor trees (size <= 8),
// affine closures for Int->Int. Throws EvalError for unsupported sorts.
Value random_value(const DefEnv& env, Sort s, const std::string& datatype,
                   std::mt19937_64& rng, int attempt = 0);

// A store under which every hypothesis evaluates to true: first a solver
// model with unconstrained tokens concretized randomly, then random
// generation with rejection; nullopt once the attempt budget is spent.
std::optional<Store> sample_store(const DefEnv& env,
                                  const std::vector<Term>& hyps,
                                  const std::vector<reflect::FreeVar>& vars,
                                  std::mt19937_64& rng, int budget = 512);

}  // namespace ple::interp
