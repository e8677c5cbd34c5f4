#pragma once

#include "sgs/game.hpp"

namespace sgs {

struct OracleResult {
  RationalVec values;  // exact per-state values
  Strategy sigma;      // one profile optimal at every state simultaneously
  Strategy tau;
  long profiles_examined = 0;
};

/// Ground-truth solver by exhaustive enumeration of memoryless deterministic
/// strategy profiles with exact rational chain solves. For each Maximizer
/// strategy the pointwise minimum over Minimizer strategies is taken, then
/// the pointwise maximum over Maximizer strategies. Intended for desk-scale
/// games; throws SolverError when the profile count exceeds the budget.
OracleResult exact_solve(const StochasticGame& game, double profile_budget = 1e7);

/// Same enumeration with the quantifier order swapped (inf sup instead of
/// sup inf); used to check the determinacy property on small games.
RationalVec exact_solve_swapped(const StochasticGame& game, double profile_budget = 1e7);

}  // namespace sgs
