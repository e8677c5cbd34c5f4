#pragma once

#include <vector>

#include "sgs/game.hpp"

namespace sgs {

struct ChainSolveStats {
  double residual = 0;  // infinity-norm residual of the float linear solve
  int unknowns = 0;     // states handled by the linear system
};

/// Exact reachability probabilities of `targets` in the Markov chain given
/// by one chosen action per state. States with no path to a target get 0,
/// states that cannot avoid the targets get 1, and the remaining linear
/// system x = Px + b is solved directly (sparse LU in double, fraction-free
/// Gaussian elimination over rationals).
ValueVec chain_reach(const StochasticGame& game, const std::vector<int>& choice,
                     const std::vector<char>& targets, ChainSolveStats* stats = nullptr);

RationalVec chain_reach_exact(const StochasticGame& game, const std::vector<int>& choice,
                              const std::vector<char>& targets);

/// Reachability values of the chain induced by a strategy profile.
ValueVec induce_and_solve(const StochasticGame& game, const Strategy& sigma, const Strategy& tau,
                          const std::vector<char>& targets, ChainSolveStats* stats = nullptr);

RationalVec induce_and_solve_exact(const StochasticGame& game, const Strategy& sigma,
                                   const Strategy& tau, const std::vector<char>& targets);

/// Dense rational linear solve A x = b by Gaussian elimination with
/// first-nonzero pivoting. Throws SolverError on a singular system.
RationalVec solve_linear_exact(Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> A,
                               RationalVec b);

}  // namespace sgs
