#include "sgs/si.hpp"

#include <algorithm>

#include "sgs/chain.hpp"

namespace sgs {

namespace {

// Greatest set avoiding the targets in which Maximizer's fixed choices stay
// and Minimizer can stay. Minimizer traps the play there, so those states
// have value 0 in the induced MDP.
std::vector<char> min_safe_region(const StochasticGame& g, const Strategy& sigma) {
  const int n = g.num_states();
  std::vector<char> in(n);
  for (int s = 0; s < n; ++s) in[s] = !g.is_target(s);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (!in[s]) continue;
      bool stays = false;
      if (g.owner(s) == Owner::Maximizer) {
        stays = true;
        for (const auto& br : g.action(s, sigma.choice[s]).branches)
          if (!in[br.target]) {
            stays = false;
            break;
          }
      } else {
        for (int a = 0; a < g.num_actions(s) && !stays; ++a) {
          bool all_in = true;
          for (const auto& br : g.action(s, a).branches)
            if (!in[br.target]) {
              all_in = false;
              break;
            }
          stays = all_in;
        }
      }
      if (!stays) {
        in[s] = 0;
        changed = true;
      }
    }
  }
  return in;
}

int trapping_action(const StochasticGame& g, const std::vector<char>& region, int s) {
  for (int a = 0; a < g.num_actions(s); ++a) {
    bool all_in = true;
    for (const auto& br : g.action(s, a).branches)
      if (!region[br.target]) {
        all_in = false;
        break;
      }
    if (all_in) return a;
  }
  return -1;
}

void check_properness(const StochasticGame& g, const Strategy& sigma,
                      const std::vector<char>& trap_region) {
  auto zero = zero_value_states(g);
  for (int s = 0; s < g.num_states(); ++s)
    if (trap_region[s] && !zero[s])
      throw PropernessError("strategy is not proper: Minimizer can trap the play at state " +
                            std::to_string(s) + " although its value is positive");
}

// Minimizer policy iteration against a fixed sigma; Scalar is double or
// Rational. States where Minimizer can trap are fixed to a trapping action
// up front, which pins their value to 0 and leaves the Bellman fixpoint of
// the rest unique.
template <class Scalar>
std::pair<Vec<Scalar>, Strategy> opponent_policy_iteration(const StochasticGame& g,
                                                           const Strategy& sigma,
                                                           const std::vector<char>& trap_region,
                                                           long* iterations) {
  const int n = g.num_states();
  std::vector<int> choice(n);
  std::vector<char> frozen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (g.owner(s) == Owner::Maximizer) {
      choice[s] = sigma.choice[s];
    } else if (trap_region[s]) {
      int a = trapping_action(g, trap_region, s);
      choice[s] = a >= 0 ? a : 0;
      frozen[s] = a >= 0;
    } else {
      choice[s] = 0;
    }
  }

  const long cap = 4 * g.total_actions() + 16;
  Vec<Scalar> values;
  for (long round = 0; round < cap; ++round) {
    if (iterations) ++*iterations;
    if constexpr (std::is_same_v<Scalar, Rational>)
      values = chain_reach_exact(g, choice, g.target_mask());
    else
      values = chain_reach(g, choice, g.target_mask());

    bool changed = false;
    for (int s = 0; s < n; ++s) {
      if (g.owner(s) != Owner::Minimizer || frozen[s]) continue;
      int best_a = choice[s];
      Scalar best = state_action_value(g, values, s, choice[s]);
      for (int a = 0; a < g.num_actions(s); ++a) {
        Scalar v = state_action_value(g, values, s, a);
        if (v < best) {
          best = v;
          best_a = a;
        }
      }
      if (best_a != choice[s]) {
        choice[s] = best_a;
        changed = true;
      }
    }
    if (!changed) break;
  }

  Strategy tau(Owner::Minimizer, n);
  for (int s = 0; s < n; ++s)
    if (g.owner(s) == Owner::Minimizer) tau.choice[s] = choice[s];
  return {values, tau};
}

StochasticGame induced_mdp(const StochasticGame& g, const Strategy& sigma) {
  GameBuilder b(g.num_states());
  b.set_initial(g.initial());
  for (int t : g.targets()) b.add_target(t);
  for (int s = 0; s < g.num_states(); ++s) {
    b.set_owner(s, g.owner(s));
    if (g.owner(s) == Owner::Maximizer && !g.is_target(s)) {
      const auto& act = g.action(s, sigma.choice[s]);
      b.add_action(s, act.name, act.branches);
    } else {
      for (const auto& act : g.actions(s)) b.add_action(s, act.name, act.branches);
    }
  }
  return std::move(b).build();
}

// Domination test for the improvement step: every multi-action Maximizer
// state either has an action whose lower bound beats every other action's
// upper bound, or all its action bounds are tight.
bool improvement_decided(const StochasticGame& g, const Bounds& b, double inner_eps) {
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Maximizer || g.num_actions(s) < 2 || g.is_target(s)) continue;
    int best_a = 0;
    double best_lower = state_action_value(g, b.lower, s, 0);
    for (int a = 1; a < g.num_actions(s); ++a) {
      double v = state_action_value(g, b.lower, s, a);
      if (v > best_lower) {
        best_lower = v;
        best_a = a;
      }
    }
    bool dominates = true;
    bool tight = true;
    for (int a = 0; a < g.num_actions(s); ++a) {
      double au = state_action_value(g, b.upper, s, a);
      double al = state_action_value(g, b.lower, s, a);
      if (au - al >= inner_eps) tight = false;
      if (a != best_a && au >= best_lower) dominates = false;
    }
    if (!dominates && !tight) return false;
  }
  return true;
}

}  // namespace

BestResponse best_response(const StochasticGame& g, const Strategy& sigma, const SiConfig& cfg,
                           const ValueVec* inner_warm) {
  check_strategy(g, sigma);
  auto trap_region = min_safe_region(g, sigma);
  check_properness(g, sigma, trap_region);

  BestResponse out;
  switch (cfg.opponent) {
    case OpponentSolver::ExactPi: {
      if (cfg.exact_rational) {
        auto [values, tau] = opponent_policy_iteration<Rational>(g, sigma, trap_region,
                                                                 &out.inner_iterations);
        out.lower.resize(g.num_states());
        for (int s = 0; s < g.num_states(); ++s) out.lower[s] = values[s].to_double();
        out.exact = std::move(values);
        out.tau = std::move(tau);
      } else {
        auto [values, tau] = opponent_policy_iteration<double>(g, sigma, trap_region,
                                                               &out.inner_iterations);
        out.lower = std::move(values);
        out.tau = std::move(tau);
      }
      out.upper = out.lower;
      return out;
    }
    case OpponentSolver::BviDomination: {
      StochasticGame mdp = induced_mdp(g, sigma);
      BviConfig inner;
      inner.eps = cfg.inner_eps;
      inner.deadline = cfg.deadline;
      if (inner_warm) inner.warm_lower = *inner_warm;
      inner.stop_hook = [&g, &inner](const Bounds& b) {
        return improvement_decided(g, b, inner.eps);
      };
      SolveResult r = solve_bvi(mdp, inner);
      out.inner_iterations = r.stats.iterations;
      out.lower = r.values;
      out.upper = r.upper ? *r.upper : r.values;
      out.tau = r.tau;
      return out;
    }
    case OpponentSolver::UnsafeVi: {
      StochasticGame mdp = induced_mdp(g, sigma);
      BviConfig inner;
      inner.eps = cfg.inner_eps;
      inner.deadline = cfg.deadline;
      if (inner_warm) inner.warm_lower = *inner_warm;
      SolveResult r = solve_vi(mdp, inner);
      out.inner_iterations = r.stats.iterations;
      out.lower = r.values;
      out.upper = r.values;
      out.tau = r.tau;
      return out;
    }
  }
  throw SolverError("unknown opponent solver");
}

Strategy improve(const StochasticGame& g, const ValueVec& lower, const Strategy& sigma) {
  Strategy next = sigma;
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Maximizer) continue;
    int best_a = 0;
    double best = state_action_value(g, lower, s, 0);
    for (int a = 1; a < g.num_actions(s); ++a) {
      double v = state_action_value(g, lower, s, a);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    // keep the incumbent whenever it attains the maximum
    if (state_action_value(g, lower, s, sigma.choice[s]) == best) continue;
    next.choice[s] = best_a;
  }
  return next;
}

Strategy improve_dominated(const StochasticGame& g, const ValueVec& lower, const ValueVec& upper,
                           const Strategy& sigma) {
  Strategy next = sigma;
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Maximizer) continue;
    int best_a = 0;
    double best = state_action_value(g, lower, s, 0);
    for (int a = 1; a < g.num_actions(s); ++a) {
      double v = state_action_value(g, lower, s, a);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    if (best_a != sigma.choice[s] && best > state_action_value(g, upper, s, sigma.choice[s]))
      next.choice[s] = best_a;
  }
  return next;
}

SolveResult solve_si(const StochasticGame& g, const SiConfig& cfg) {
  const int n = g.num_states();
  Strategy sigma(Owner::Maximizer, n);
  if (cfg.warm_start) {
    Strategy candidate(Owner::Maximizer, n);
    for (int s = 0; s < n; ++s)
      if (g.owner(s) == Owner::Maximizer)
        candidate.choice[s] = greedy_action(g, *cfg.warm_start, s);
    sigma = make_proper(g, candidate, &*cfg.warm_start);
  } else {
    sigma = attractor_strategy(g);
  }

  SolveResult result;
  result.status = SolveStatus::IterationCap;
  SiConfig mode = cfg;
  ValueVec round_warm = ValueVec::Zero(n);
  for (int t : g.targets()) round_warm[t] = 1.0;

  BestResponse br;
  long rounds = 0;
  bool confirming = false;
  while (rounds < cfg.max_rounds) {
    ++rounds;
    br = best_response(g, sigma, mode, &round_warm);
    result.stats.sub_solves += br.inner_iterations;
    round_warm = br.lower;

    Strategy next = mode.opponent == OpponentSolver::BviDomination
                        ? improve_dominated(g, br.lower, br.upper, sigma)
                        : improve(g, br.lower, sigma);
    next = make_proper(g, next, &br.lower);
    if (next == sigma) {
      if (mode.opponent == OpponentSolver::BviDomination && !confirming) {
        // a concluding exact solve confirms the choices and yields tau
        mode.opponent = OpponentSolver::ExactPi;
        confirming = true;
        continue;
      }
      result.status = SolveStatus::Converged;
      break;
    }
    sigma = next;
    if (deadline_passed(cfg.deadline)) {
      result.status = SolveStatus::Timeout;
      break;
    }
  }

  if (mode.opponent != OpponentSolver::ExactPi && cfg.opponent != OpponentSolver::UnsafeVi) {
    mode.opponent = OpponentSolver::ExactPi;
    br = best_response(g, sigma, mode);
  }

  result.stats.iterations = rounds;
  result.values = br.lower;
  result.exact = br.exact;
  result.sigma = sigma;
  result.tau = br.tau;
  result.stats.gap = (br.upper - br.lower).maxCoeff();
  return result;
}

}  // namespace sgs
