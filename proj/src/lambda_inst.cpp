#include "ple/lambda_inst.hpp"

#include <unordered_set>

namespace ple::lambda_inst {

namespace {

// Free occurrence of the pool variable (argsort, index), respecting
// shadowing by nested lambdas with the same binder.
bool pool_free_in(const Term& t, int index, const Sort& argsort) {
  if (!t.valid()) return false;
  if (t.kind() == TermKind::Var)
    return is_pool_var(t) && pool_var_index(t) == index && t.sort() == argsort;
  if (t.kind() == TermKind::ULam && t.n().binder == index &&
      t.sort().fun_arg() == argsort)
    return false;
  for (const Term& a : t.args())
    if (pool_free_in(a, index, argsort)) return true;
  return false;
}

template <typename F>
void walk(const Term& t, F&& fn) {
  if (!t.valid()) return;
  fn(t);
  for (const Term& a : t.args()) walk(a, fn);
}

struct Collector {
  std::unordered_set<Term, TermHash> seen;
  std::vector<Term> out;

  void add(Term eq) {
    if (seen.insert(eq).second) out.push_back(std::move(eq));
  }
};

void alpha_for(const Term& t, const LambdaConfig& cfg, Collector& col) {
  walk(t, [&](const Term& s) {
    if (s.kind() != TermKind::ULam) return;
    int i = s.n().binder;
    Sort as = s.sort().fun_arg();
    const Term& body = s.args()[0];
    Term xi = pool_var(as, i);
    for (int j = i + 1; j <= cfg.pool; j++) {
      // A binder already free in the body would be captured by the
      // renaming; such an instance is not an alpha-equivalence.
      if (pool_free_in(body, j, as)) continue;
      Term renamed = substitute(body, {{xi.n().name, pool_var(as, j)}});
      col.add(mk_eq(s, mk_ulam(j, renamed, as)));
    }
  });
}

void beta_for(const Term& t, Collector& col) {
  walk(t, [&](const Term& s) {
    if (s.kind() != TermKind::UApp) return;
    const Term& f = s.args()[0];
    const Term& a = s.args()[1];
    if (f.kind() != TermKind::ULam) return;
    if (contains_ulam(a)) return;
    Term xi = pool_var(f.sort().fun_arg(), f.n().binder);
    Term contracted = substitute(f.args()[0], {{xi.n().name, a}});
    col.add(mk_eq(s, contracted));
  });
}

}  // namespace

std::vector<Term> alpha_instances(const std::vector<Term>& terms,
                                  const LambdaConfig& cfg) {
  Collector col;
  for (const Term& t : terms) alpha_for(t, cfg, col);
  return std::move(col.out);
}

std::vector<Term> beta_instances(const std::vector<Term>& terms,
                                 const LambdaConfig& cfg) {
  (void)cfg;
  Collector col;
  for (const Term& t : terms) beta_for(t, col);
  return std::move(col.out);
}

std::vector<Term> lambda_instances(const std::vector<Term>& terms,
                                   const LambdaConfig& cfg) {
  Collector col;
  std::vector<Term> all;
  std::vector<Term> frontier = terms;
  if (cfg.enable_alpha) {
    for (const Term& t : frontier) alpha_for(t, cfg, col);
    all = col.out;
    frontier.insert(frontier.end(), col.out.begin(), col.out.end());
  }
  if (cfg.enable_beta) {
    // Contraction right-hand sides can expose new redexes; iterate until
    // no new equalities appear (bounded, since each round must grow the
    // deduplicated set to continue).
    for (int round = 0; round < 64; round++) {
      size_t before = col.out.size();
      std::vector<Term> next = std::move(frontier);
      frontier.clear();
      for (const Term& t : next) beta_for(t, col);
      if (col.out.size() == before) break;
      frontier.assign(col.out.begin() + before, col.out.end());
      all.insert(all.end(), frontier.begin(), frontier.end());
    }
  }
  return all;
}

}  // namespace ple::lambda_inst
