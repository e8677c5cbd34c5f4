#include "sgs/bvi.hpp"

#include <algorithm>

#include "sgs/analysis.hpp"

namespace sgs {

Bounds initial_bounds(const StochasticGame& g, const std::vector<char>& pinned_zero) {
  const int n = g.num_states();
  Bounds b;
  b.lower = ValueVec::Zero(n);
  b.upper = ValueVec::Ones(n);
  for (int s = 0; s < n; ++s) {
    if (g.is_target(s)) b.lower[s] = 1.0;
    if (!pinned_zero.empty() && pinned_zero[s]) b.upper[s] = 0.0;
  }
  return b;
}

namespace {

// Shared update for one side of the bounds. Identical summation order for
// L and U keeps L <= U exact even in floating point.
void bellman_into(const StochasticGame& g, const ValueVec& src, ValueVec& dst,
                  const std::vector<char>& pinned_zero) {
  const int n = g.num_states();
  for (int s = 0; s < n; ++s) {
    if (g.is_target(s)) {
      dst[s] = 1.0;
      continue;
    }
    if (!pinned_zero.empty() && pinned_zero[s]) {
      dst[s] = 0.0;
      continue;
    }
    double v = bellman_value(g, src, s);
    dst[s] = std::min(1.0, std::max(0.0, v));
  }
}

}  // namespace

Bounds bellman_step(const StochasticGame& g, const Bounds& bounds,
                    const std::vector<char>& pinned_zero) {
  Bounds out;
  out.lower.resize(g.num_states());
  out.upper.resize(g.num_states());
  bellman_into(g, bounds.lower, out.lower, pinned_zero);
  bellman_into(g, bounds.upper, out.upper, pinned_zero);
  return out;
}

ValueVec bellman_step_lower(const StochasticGame& g, const ValueVec& lower) {
  ValueVec out(g.num_states());
  bellman_into(g, lower, out, {});
  return out;
}

double best_exit(const StochasticGame& g, const ValueVec& upper, const std::vector<int>& T) {
  std::vector<char> in(g.num_states(), 0);
  for (int s : T) in[s] = 1;
  double best = 0.0;  // no Maximizer exit: component is winning for Minimizer
  for (int s : T) {
    if (g.owner(s) != Owner::Maximizer) continue;
    for (int a = 0; a < g.num_actions(s); ++a) {
      bool leaves = false;
      for (const auto& br : g.action(s, a).branches)
        if (!in[br.target]) {
          leaves = true;
          break;
        }
      if (!leaves) continue;
      best = std::max(best, state_action_value(g, upper, s, a));
    }
  }
  return best;
}

std::vector<std::vector<int>> find_secs(const StochasticGame& g, const ValueVec& lower,
                                        bool include_sink_components) {
  std::vector<std::vector<char>> allowed(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) {
    allowed[s].assign(g.num_actions(s), 1);
    if (g.owner(s) != Owner::Minimizer || g.num_actions(s) <= 1) continue;
    double best = state_action_value(g, lower, s, 0);
    for (int a = 1; a < g.num_actions(s); ++a)
      best = std::min(best, state_action_value(g, lower, s, a));
    for (int a = 0; a < g.num_actions(s); ++a)
      allowed[s][a] = state_action_value(g, lower, s, a) == best;
  }
  auto mecs = mec_decomposition_restricted(g, allowed);
  auto sinks = compute_sinks(g);

  std::vector<std::vector<int>> secs;
  for (auto& m : mecs) {
    bool has_target = std::any_of(m.states.begin(), m.states.end(),
                                  [&](int s) { return g.is_target(s); });
    if (has_target) continue;
    // A MEC intersecting the sink region lies entirely inside it.
    if (!include_sink_components && sinks[m.states.front()]) continue;
    secs.push_back(std::move(m.states));
  }
  return secs;
}

void deflate(const StochasticGame& g, ValueVec& upper,
             const std::vector<std::vector<int>>& secs, long* deflations) {
  for (const auto& T : secs) {
    double exit_value = best_exit(g, upper, T);
    for (int s : T)
      if (exit_value < upper[s]) upper[s] = exit_value;
    if (deflations) ++*deflations;
  }
}

SolveResult solve_bvi(const StochasticGame& g, const BviConfig& cfg) {
  const int n = g.num_states();
  auto sinks = compute_sinks(g);
  std::vector<char> pinned = cfg.plain_upper_init ? std::vector<char>() : sinks;

  Bounds b = initial_bounds(g, pinned);
  if (cfg.warm_lower) {
    for (int s = 0; s < n; ++s) b.lower[s] = std::max(b.lower[s], (*cfg.warm_lower)[s]);
  }

  SolveResult result;
  result.status = SolveStatus::IterationCap;
  long iter = 0;
  while (iter < cfg.max_iterations) {
    ++iter;
    b = bellman_step(g, b, pinned);
    if (cfg.deflate_period > 0 && iter % cfg.deflate_period == 0) {
      auto secs = find_secs(g, b.lower, cfg.plain_upper_init);
      deflate(g, b.upper, secs, &result.stats.deflations);
    }
    if (b.max_gap() < cfg.eps) {
      result.status = SolveStatus::Converged;
      break;
    }
    if (cfg.stop_hook && cfg.stop_hook(b)) {
      result.status = SolveStatus::Converged;
      break;
    }
    if ((iter & 63) == 0 && deadline_passed(cfg.deadline)) {
      result.status = SolveStatus::Timeout;
      break;
    }
  }

  result.stats.iterations = iter;
  result.stats.gap = b.max_gap();
  result.values = b.lower;
  result.upper = b.upper;

  // Strategy extraction: greedy on L with attractor-style repair for
  // Maximizer; greedy suffices for Minimizer.
  Strategy sigma(Owner::Maximizer, n), tau(Owner::Minimizer, n);
  for (int s = 0; s < n; ++s) {
    if (g.owner(s) == Owner::Maximizer)
      sigma.choice[s] = greedy_action(g, b.lower, s);
    else
      tau.choice[s] = greedy_action(g, b.lower, s);
  }
  result.sigma = make_proper(g, sigma, &b.lower);
  result.tau = tau;
  return result;
}

SolveResult solve_vi(const StochasticGame& g, const BviConfig& cfg) {
  const int n = g.num_states();
  ValueVec lower = ValueVec::Zero(n);
  for (int t : g.targets()) lower[t] = 1.0;
  if (cfg.warm_lower)
    for (int s = 0; s < n; ++s) lower[s] = std::max(lower[s], (*cfg.warm_lower)[s]);

  SolveResult result;
  result.status = SolveStatus::IterationCap;
  long iter = 0;
  double change = 1.0;
  while (iter < cfg.max_iterations) {
    ++iter;
    ValueVec next = bellman_step_lower(g, lower);
    change = (next - lower).cwiseAbs().maxCoeff();
    lower = std::move(next);
    if (change < cfg.eps) {
      result.status = SolveStatus::Converged;
      break;
    }
    if ((iter & 63) == 0 && deadline_passed(cfg.deadline)) {
      result.status = SolveStatus::Timeout;
      break;
    }
  }

  result.stats.iterations = iter;
  result.stats.gap = change;
  result.values = lower;
  Strategy sigma(Owner::Maximizer, n), tau(Owner::Minimizer, n);
  for (int s = 0; s < n; ++s) {
    if (g.owner(s) == Owner::Maximizer)
      sigma.choice[s] = greedy_action(g, lower, s);
    else
      tau.choice[s] = greedy_action(g, lower, s);
  }
  result.sigma = make_proper(g, sigma, &lower);
  result.tau = tau;
  return result;
}

}  // namespace sgs
