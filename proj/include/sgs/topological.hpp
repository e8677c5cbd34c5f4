#pragma once

#include <vector>

#include "sgs/bvi.hpp"
#include "sgs/game.hpp"
#include "sgs/si.hpp"

namespace sgs {

enum class SubSolver { Bvi, Si, HopLocal };

struct TopoConfig {
  SubSolver sub_solver = SubSolver::Bvi;
  double eps = 1e-6;
  bool exact_rational = false;   // Si sub-solver with rational arithmetic
  OpponentSolver opponent = OpponentSolver::ExactPi;
  // Tighten each SCC solve to eps / chain-depth so the accumulated error
  // stays under eps.
  bool tighten = false;
  long max_iterations = 10'000'000;
  Deadline deadline;
};

struct Subgame {
  StochasticGame game;
  std::vector<int> global_of_local;  // local index -> original state
  int local_target = -1;             // fresh absorbing target
  int local_sink = -1;               // fresh absorbing sink
};

/// Sub-game over one SCC: transitions to already-solved external states are
/// redirected to a fresh target with probability p * solved(s') and to a
/// fresh sink with the remaining p * (1 - solved(s')), so the values of the
/// SCC states in the sub-game equal their values in the full game.
Subgame build_subgame(const StochasticGame& game, const std::vector<int>& scc,
                      const std::vector<Rational>& solved, const std::vector<char>& solved_mask);

/// Solves the game one SCC at a time in reverse topological order: targets
/// get 1 and sinks 0 up front, every remaining SCC is solved on its
/// sub-game, and per-SCC achieved gaps plus a conservative accumulated
/// bound are reported.
SolveResult topo_solve(const StochasticGame& game, const TopoConfig& cfg = {});

}  // namespace sgs
