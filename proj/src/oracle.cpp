#include "sgs/oracle.hpp"

#include <vector>

#include "sgs/bellman.hpp"
#include "sgs/chain.hpp"

namespace sgs {

namespace {

std::vector<int> player_states(const StochasticGame& g, Owner who) {
  std::vector<int> out;
  for (int s = 0; s < g.num_states(); ++s)
    if (g.owner(s) == who) out.push_back(s);
  return out;
}

// Odometer over the action choices of the given states.
bool next_assignment(const StochasticGame& g, const std::vector<int>& states,
                     std::vector<int>& choice) {
  for (int s : states) {
    if (++choice[s] < g.num_actions(s)) return true;
    choice[s] = 0;
  }
  return false;
}

double profile_count(const StochasticGame& g) {
  double n = 1;
  for (int s = 0; s < g.num_states(); ++s) n *= g.num_actions(s);
  return n;
}

}  // namespace

OracleResult exact_solve(const StochasticGame& g, double profile_budget) {
  const int n = g.num_states();
  double count = profile_count(g);
  if (count > profile_budget)
    throw SolverError("oracle: " + std::to_string(count) + " strategy profiles exceed budget " +
                      std::to_string(profile_budget));

  auto max_states = player_states(g, Owner::Maximizer);
  auto min_states = player_states(g, Owner::Minimizer);

  OracleResult out;

  // Pointwise minimum over all Minimizer strategies against a fixed sigma.
  auto min_response = [&](std::vector<int>& choice) {
    RationalVec response;
    bool first = true;
    for (int s : min_states) choice[s] = 0;
    do {
      ++out.profiles_examined;
      RationalVec v = chain_reach_exact(g, choice, g.target_mask());
      if (first) {
        response = std::move(v);
        first = false;
      } else {
        for (int s = 0; s < n; ++s)
          if (v[s] < response[s]) response[s] = v[s];
      }
    } while (next_assignment(g, min_states, choice));
    return response;
  };

  // First pass: value vector = pointwise max over sigma of min_response.
  std::vector<int> choice(n, 0);
  RationalVec values;
  bool first = true;
  do {
    RationalVec response = min_response(choice);
    if (first) {
      values = std::move(response);
      first = false;
    } else {
      for (int s = 0; s < n; ++s)
        if (values[s] < response[s]) values[s] = response[s];
    }
  } while (next_assignment(g, max_states, choice));

  // Second pass: a sigma attaining the value vector at every state exists
  // because memoryless deterministic strategies are optimal; find the first.
  std::fill(choice.begin(), choice.end(), 0);
  std::vector<int> witness_sigma;
  do {
    if (min_response(choice) == values) {
      witness_sigma = choice;
      break;
    }
  } while (next_assignment(g, max_states, choice));
  if (witness_sigma.empty()) throw SolverError("oracle: no uniformly optimal Maximizer strategy");

  // Against the witness sigma, some tau attains the minimum everywhere.
  choice = witness_sigma;
  std::vector<int> witness_tau;
  do {
    if (chain_reach_exact(g, choice, g.target_mask()) == values) {
      witness_tau = choice;
      break;
    }
  } while (next_assignment(g, min_states, choice));
  if (witness_tau.empty()) throw SolverError("oracle: no uniformly optimal Minimizer strategy");

  out.values = std::move(values);
  out.sigma = Strategy(Owner::Maximizer, n);
  out.tau = Strategy(Owner::Minimizer, n);
  for (int s : max_states) out.sigma.choice[s] = witness_sigma[s];
  for (int s : min_states) out.tau.choice[s] = witness_tau[s];

  // Bellman-consistency check guards the implementation.
  for (int s = 0; s < n; ++s) {
    if (g.is_target(s)) {
      if (out.values[s] != Rational(1)) throw SolverError("oracle: target value not 1");
      continue;
    }
    Rational best = state_action_value(g, out.values, s, 0);
    for (int a = 1; a < g.num_actions(s); ++a) {
      Rational v = state_action_value(g, out.values, s, a);
      if (g.owner(s) == Owner::Maximizer ? (best < v) : (v < best)) best = v;
    }
    if (best != out.values[s])
      throw SolverError("oracle: values are not a Bellman fixpoint at state " + std::to_string(s));
  }
  return out;
}

RationalVec exact_solve_swapped(const StochasticGame& g, double profile_budget) {
  const int n = g.num_states();
  if (profile_count(g) > profile_budget) throw SolverError("oracle: profile budget exceeded");

  auto max_states = player_states(g, Owner::Maximizer);
  auto min_states = player_states(g, Owner::Minimizer);
  std::vector<int> choice(n, 0);

  RationalVec values;
  bool first_tau = true;
  do {
    RationalVec response;
    bool first_sigma = true;
    for (int s : max_states) choice[s] = 0;
    do {
      RationalVec v = chain_reach_exact(g, choice, g.target_mask());
      if (first_sigma) {
        response = std::move(v);
        first_sigma = false;
      } else {
        for (int s = 0; s < n; ++s)
          if (response[s] < v[s]) response[s] = v[s];
      }
    } while (next_assignment(g, max_states, choice));
    if (first_tau) {
      values = std::move(response);
      first_tau = false;
    } else {
      for (int s = 0; s < n; ++s)
        if (response[s] < values[s]) values[s] = response[s];
    }
  } while (next_assignment(g, min_states, choice));
  return values;
}

}  // namespace sgs
