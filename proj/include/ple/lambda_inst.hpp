#pragma once

#include <vector>

#include "ple/terms.hpp"

namespace ple::lambda_inst {

// Pool of lambda binder names per argument sort plus instance toggles.
struct LambdaConfig {
  int pool = 8;  // largest binder index drawn from the pool
  bool enable_alpha = true;
  bool enable_beta = true;
};

// For each lambda subterm ULam(i, e) and every pool index j with
// i < j <= pool whose binder is fresh for e: the renaming equality
// ULam(i, e) = ULam(j, e[x_i := x_j]).
std::vector<Term> alpha_instances(const std::vector<Term>& terms,
                                  const LambdaConfig& cfg = {});

// For each redex UApp(ULam(i, e), a) with lambda-free argument a: the
// contraction equality UApp(ULam(i, e), a) = e[x_i := a].
std::vector<Term> beta_instances(const std::vector<Term>& terms,
                                 const LambdaConfig& cfg = {});

// One alpha round over the inputs, then beta rounds to a fixpoint (new
// redexes can appear inside contraction right-hand sides). Deduplicated.
std::vector<Term> lambda_instances(const std::vector<Term>& terms,
                                   const LambdaConfig& cfg = {});

}  // namespace ple::lambda_inst
