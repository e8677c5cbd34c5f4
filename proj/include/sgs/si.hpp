#pragma once

#include <optional>

#include "sgs/analysis.hpp"
#include "sgs/bvi.hpp"
#include "sgs/game.hpp"

namespace sgs {

enum class OpponentSolver {
  ExactPi,        // Minimizer policy iteration with exact chain solves
  BviDomination,  // bounded VI on the induced MDP with action-domination stop
  UnsafeVi,       // plain unguaranteed VI; may fix wrong choices
};

struct SiConfig {
  OpponentSolver opponent = OpponentSolver::ExactPi;
  double inner_eps = 1e-8;  // precision of the BVI-based best response
  long max_rounds = 1000;   // improvement-round safety cap
  bool exact_rational = false;  // rational arithmetic in chain solves
  std::optional<ValueVec> warm_start;  // value estimates for the initial strategy
  Deadline deadline;
};

/// Minimizer's best response against a fixed Maximizer strategy.
struct BestResponse {
  ValueVec lower;   // value estimates (exact modes: the values themselves)
  ValueVec upper;   // equal to lower in exact modes
  std::optional<RationalVec> exact;
  Strategy tau;
  long inner_iterations = 0;
};

/// Solves the MDP induced by sigma for the opponent: lower[s] approaches
/// inf over tau of the reachability probability. Throws PropernessError when
/// sigma lets Minimizer trap the play outside the target/sink region in a
/// positive-value area.
BestResponse best_response(const StochasticGame& game, const Strategy& sigma,
                           const SiConfig& cfg, const ValueVec* inner_warm = nullptr);

/// Greedy Maximizer improvement: argmax of the action values under L,
/// keeping the incumbent action whenever it is among the argmax set.
Strategy improve(const StochasticGame& game, const ValueVec& lower, const Strategy& sigma);

/// Improvement under bounds: switches only to actions whose lower bound
/// beats the incumbent's upper bound (a certain improvement).
Strategy improve_dominated(const StochasticGame& game, const ValueVec& lower,
                           const ValueVec& upper, const Strategy& sigma);

/// Strategy iteration with attractor (or repaired warm-start)
/// initialization. Iterates best response and greedy improvement until the
/// Maximizer strategy is stable; the final values and Minimizer strategy
/// come from a concluding exact best response.
SolveResult solve_si(const StochasticGame& game, const SiConfig& cfg = {});

}  // namespace sgs
