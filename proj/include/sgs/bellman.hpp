#pragma once

#include <vector>

#include "sgs/game.hpp"

namespace sgs {

namespace detail {
template <class Scalar>
inline Scalar branch_prob(const Transition& br);
template <>
inline double branch_prob<double>(const Transition& br) { return br.prob_d; }
template <>
inline Rational branch_prob<Rational>(const Transition& br) { return br.prob; }
}  // namespace detail

/// val(s,a): probability-weighted sum of the successor values.
template <class Scalar>
Scalar state_action_value(const StochasticGame& game, const Vec<Scalar>& values, int s, int a) {
  Scalar sum(0);
  for (const auto& br : game.action(s, a).branches)
    sum += detail::branch_prob<Scalar>(br) * values[br.target];
  return sum;
}

/// Owner's max/min over the action values of s.
template <class Scalar>
Scalar bellman_value(const StochasticGame& game, const Vec<Scalar>& values, int s) {
  Scalar best = state_action_value(game, values, s, 0);
  for (int a = 1; a < game.num_actions(s); ++a) {
    Scalar v = state_action_value(game, values, s, a);
    if (game.owner(s) == Owner::Maximizer ? (best < v) : (v < best)) best = v;
  }
  return best;
}

/// Owner-optimal action index under `values`; ties break to the lowest index.
template <class Scalar>
int greedy_action(const StochasticGame& game, const Vec<Scalar>& values, int s) {
  int best_a = 0;
  Scalar best = state_action_value(game, values, s, 0);
  for (int a = 1; a < game.num_actions(s); ++a) {
    Scalar v = state_action_value(game, values, s, a);
    if (game.owner(s) == Owner::Maximizer ? (best < v) : (v < best)) {
      best = v;
      best_a = a;
    }
  }
  return best_a;
}

/// Paired monotone under-/over-approximation of the value vector.
struct Bounds {
  ValueVec lower;
  ValueVec upper;

  double gap(int s) const { return upper[s] - lower[s]; }
  double max_gap() const { return (upper - lower).maxCoeff(); }
};

/// Bounds at the start of bounded value iteration: L is 1 on targets and 0
/// elsewhere; U is 0 on the pinned states (normally the sinks) and 1
/// elsewhere; targets are (1,1).
Bounds initial_bounds(const StochasticGame& game, const std::vector<char>& pinned_zero);

/// One synchronous Bellman update of both bounds. Targets stay at (1,1),
/// states in pinned_zero stay at (0,0), everything else gets the owner's
/// max/min over action values. Values are clamped to [0,1].
Bounds bellman_step(const StochasticGame& game, const Bounds& bounds,
                    const std::vector<char>& pinned_zero);

/// Lower-only variant used by plain value iteration.
ValueVec bellman_step_lower(const StochasticGame& game, const ValueVec& lower);

/// Best Maximizer exit of the state set T under value estimates U: the
/// maximum of state_action_value(U,s,a) over Maximizer-owned pairs leaving
/// T. Returns 0 when T has no Maximizer exit (such a component is winning
/// for Minimizer).
double best_exit(const StochasticGame& game, const ValueVec& upper, const std::vector<int>& T);

}  // namespace sgs
