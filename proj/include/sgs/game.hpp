#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "sgs/errors.hpp"
#include "sgs/rational.hpp"

namespace sgs {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ValueVec = Vec<double>;
using RationalVec = Vec<Rational>;

enum class Owner { Maximizer, Minimizer };

inline const char* owner_name(Owner o) { return o == Owner::Maximizer ? "max" : "min"; }

struct Transition {
  int target = -1;
  Rational prob;    // exact probability, in (0,1]
  double prob_d = 0;  // cached double rounding of prob

  Transition() = default;
  Transition(int target_, Rational prob_)
      : target(target_), prob(std::move(prob_)), prob_d(prob.to_double()) {}
};

struct GameAction {
  std::string name;
  std::vector<Transition> branches;
};

struct GameState {
  Owner owner = Owner::Maximizer;
  std::vector<GameAction> actions;
};

/// Turn-based stochastic game with a reachability target set.
///
/// States are dense indices 0..n-1. Each state is owned by Maximizer or
/// Minimizer and carries a non-empty ordered action list; every action maps
/// to a probability distribution over successors. Target states are
/// normalized to a single probability-1 self-loop. Instances are immutable
/// after validation and safe to share between concurrent solver runs.
class StochasticGame {
public:
  StochasticGame() = default;
  StochasticGame(std::vector<GameState> states, int initial, std::vector<int> targets);

  int num_states() const { return static_cast<int>(states_.size()); }
  int initial() const { return initial_; }
  Owner owner(int s) const { return states_[s].owner; }
  bool is_target(int s) const { return target_mask_[s] != 0; }
  const std::vector<int>& targets() const { return targets_; }
  const std::vector<char>& target_mask() const { return target_mask_; }

  int num_actions(int s) const { return static_cast<int>(states_[s].actions.size()); }
  const GameAction& action(int s, int a) const { return states_[s].actions[a]; }
  const std::vector<GameAction>& actions(int s) const { return states_[s].actions; }
  const GameState& state(int s) const { return states_[s]; }

  int max_actions() const;
  double avg_actions() const;
  long total_actions() const;

  /// Checks all structural invariants; normalize() must have run first.
  /// Throws ValidationError on violation.
  void validate() const;

  /// True when every state has at most two actions.
  bool satisfies_two_act() const;

  bool is_mdp() const;  // no Minimizer-owned states

private:
  friend class GameBuilder;
  std::vector<GameState> states_;
  int initial_ = 0;
  std::vector<int> targets_;
  std::vector<char> target_mask_;
};

/// Mutable construction helper; produces a normalized, validated game.
class GameBuilder {
public:
  explicit GameBuilder(int num_states);

  void set_initial(int s) { initial_ = s; }
  void set_owner(int s, Owner o) { states_[s].owner = o; }
  void add_target(int s);
  /// Appends an action; returns its index within the state.
  int add_action(int s, std::string name, std::vector<Transition> branches);
  int add_state(Owner o);  // returns new state index

  int num_states() const { return static_cast<int>(states_.size()); }

  /// Applies target self-loop normalization, validates, and yields the game.
  StochasticGame build() &&;

private:
  std::vector<GameState> states_;
  int initial_ = 0;
  std::vector<int> targets_;
  std::vector<char> target_mask_;
};

/// Memoryless deterministic strategy of one player.
/// choice[s] is an action index for owned states and -1 elsewhere.
struct Strategy {
  Owner player = Owner::Maximizer;
  std::vector<int> choice;

  Strategy() = default;
  Strategy(Owner p, int num_states) : player(p), choice(num_states, -1) {}

  bool operator==(const Strategy&) const = default;
};

/// Checks that a strategy covers exactly its player's states with valid
/// action indices. Throws ValidationError.
void check_strategy(const StochasticGame& game, const Strategy& strategy);

/// Markov chain obtained by fixing one action per state.
struct InducedChain {
  const StochasticGame* game = nullptr;
  std::vector<int> choice;  // one valid action index per state

  const std::vector<Transition>& dist(int s) const { return game->action(s, choice[s]).branches; }
};

/// Merges a Maximizer and a Minimizer strategy into a full choice vector.
InducedChain induce(const StochasticGame& game, const Strategy& sigma, const Strategy& tau);

enum class SolveStatus { Converged, IterationCap, Timeout, NotVerified };

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "OK";
    case SolveStatus::IterationCap: return "ITER-CAP";
    case SolveStatus::Timeout: return "TIMEOUT";
    case SolveStatus::NotVerified: return "NOT-VERIFIED";
  }
  return "?";
}

struct SccGapReport {
  int scc_index = 0;
  int size = 0;
  double own_gap = 0;        // gap achieved by the sub-solver on this SCC
  double accumulated_gap = 0;  // own gap plus worst accumulated gap of successors
};

struct SolveStats {
  long iterations = 0;    // outer iterations / improvement rounds
  long deflations = 0;    // SEC deflation passes performed
  long sub_solves = 0;    // inner solver invocations (chains, MDP solves, SCCs)
  double residual = 0;    // linear-system residual of the last chain solve
  double gap = 0;         // final max per-state U-L gap or last VI change
  int scc_chain_depth = 0;              // topological runs only
  double accumulated_gap_bound = 0;     // topological runs only
  std::vector<SccGapReport> scc_gaps;   // topological runs only
};

/// Result of a full game solve.
struct SolveResult {
  ValueVec values;                       // per-state values (lower estimates)
  std::optional<ValueVec> upper;         // upper bounds, when the solver has them
  std::optional<RationalVec> exact;      // set by exact-rational solvers
  Strategy sigma;                        // Maximizer strategy
  Strategy tau;                          // Minimizer strategy
  SolveStatus status = SolveStatus::Converged;
  SolveStats stats;

  bool converged() const { return status == SolveStatus::Converged; }
};

}  // namespace sgs
