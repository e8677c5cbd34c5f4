#include "sgs/topological.hpp"

#include <algorithm>

#include "sgs/analysis.hpp"

namespace sgs {

Subgame build_subgame(const StochasticGame& g, const std::vector<int>& scc,
                      const std::vector<Rational>& solved, const std::vector<char>& solved_mask) {
  const int k = static_cast<int>(scc.size());
  std::vector<int> local_of(g.num_states(), -1);
  for (int i = 0; i < k; ++i) local_of[scc[i]] = i;

  Subgame out;
  out.global_of_local = scc;
  out.local_target = k;
  out.local_sink = k + 1;

  GameBuilder b(k + 2);
  b.set_initial(0);
  b.add_target(out.local_target);
  b.set_owner(out.local_target, Owner::Maximizer);
  b.set_owner(out.local_sink, Owner::Maximizer);

  const Rational one(1);
  for (int i = 0; i < k; ++i) {
    const int s = scc[i];
    b.set_owner(i, g.owner(s));
    for (int a = 0; a < g.num_actions(s); ++a) {
      const auto& act = g.action(s, a);
      Rational to_target(0), to_sink(0);
      std::vector<Transition> branches;
      for (const auto& br : act.branches) {
        if (local_of[br.target] >= 0) {
          branches.emplace_back(local_of[br.target], br.prob);
        } else {
          if (!solved_mask[br.target])
            throw SolverError("topological order violated: state " + std::to_string(br.target) +
                              " is not solved yet");
          to_target += br.prob * solved[br.target];
          to_sink += br.prob * (one - solved[br.target]);
        }
      }
      if (!to_target.is_zero()) branches.emplace_back(out.local_target, to_target);
      if (!to_sink.is_zero()) branches.emplace_back(out.local_sink, to_sink);
      b.add_action(i, act.name, std::move(branches));
    }
  }
  b.add_action(out.local_target, "done", {Transition(out.local_target, one)});
  b.add_action(out.local_sink, "stuck", {Transition(out.local_sink, one)});
  out.game = std::move(b).build();
  return out;
}

SolveResult topo_solve(const StochasticGame& g, const TopoConfig& cfg) {
  const int n = g.num_states();
  auto sccs = scc_order(g);
  auto sinks = compute_sinks(g);

  // SCC chain depth: longest dependency chain of solver-processed SCCs.
  std::vector<int> comp_of(n, -1);
  for (size_t c = 0; c < sccs.size(); ++c)
    for (int s : sccs[c]) comp_of[s] = static_cast<int>(c);
  std::vector<char> processed(sccs.size(), 0);
  for (size_t c = 0; c < sccs.size(); ++c) {
    bool trivial = std::all_of(sccs[c].begin(), sccs[c].end(),
                               [&](int s) { return g.is_target(s) || sinks[s]; });
    processed[c] = !trivial;
  }
  std::vector<int> depth(sccs.size(), 0);
  int chain_depth = 0;
  for (size_t c = 0; c < sccs.size(); ++c) {  // successors first
    int succ_depth = 0;
    for (int s : sccs[c])
      for (int a = 0; a < g.num_actions(s); ++a)
        for (const auto& br : g.action(s, a).branches)
          if (comp_of[br.target] != static_cast<int>(c))
            succ_depth = std::max(succ_depth, depth[comp_of[br.target]]);
    depth[c] = succ_depth + (processed[c] ? 1 : 0);
    chain_depth = std::max(chain_depth, depth[c]);
  }

  SolveResult result;
  result.values = ValueVec::Zero(n);
  result.sigma = Strategy(Owner::Maximizer, n);
  result.tau = Strategy(Owner::Minimizer, n);
  result.stats.scc_chain_depth = chain_depth;
  if (cfg.exact_rational) result.exact = RationalVec(n);

  std::vector<Rational> solved(n, Rational(0));
  std::vector<char> solved_mask(n, 0);
  std::vector<double> acc_gap(sccs.size(), 0);
  bool all_converged = true;
  SolveStatus worst = SolveStatus::Converged;

  double sub_eps = cfg.tighten && chain_depth > 1 ? cfg.eps / chain_depth : cfg.eps;

  for (size_t c = 0; c < sccs.size(); ++c) {
    const auto& scc = sccs[c];
    // trivially assigned states: targets to 1, sinks to 0
    if (!processed[c]) {
      for (int s : scc) {
        solved[s] = Rational(g.is_target(s) ? 1 : 0);
        result.values[s] = g.is_target(s) ? 1.0 : 0.0;
        solved_mask[s] = 1;
        if (result.exact) (*result.exact)[s] = solved[s];
        if (g.owner(s) == Owner::Maximizer)
          result.sigma.choice[s] = 0;
        else
          result.tau.choice[s] = 0;
      }
      continue;
    }

    Subgame sub = build_subgame(g, scc, solved, solved_mask);
    ++result.stats.sub_solves;

    SolveResult sr;
    double own_gap = 0;
    switch (cfg.sub_solver) {
      case SubSolver::Bvi: {
        BviConfig bc;
        bc.eps = sub_eps;
        bc.max_iterations = cfg.max_iterations;
        bc.deadline = cfg.deadline;
        sr = solve_bvi(sub.game, bc);
        own_gap = sr.stats.gap;
        break;
      }
      case SubSolver::Si: {
        SiConfig sc;
        sc.exact_rational = cfg.exact_rational;
        sc.opponent = cfg.opponent;
        sc.inner_eps = sub_eps;
        sc.deadline = cfg.deadline;
        sr = solve_si(sub.game, sc);
        own_gap = cfg.exact_rational ? 0 : sr.stats.gap;
        break;
      }
      case SubSolver::HopLocal:
        throw SolverError("hop-local sub-solver is wired up in the CLI driver");
    }
    if (!sr.converged()) {
      all_converged = false;
      worst = sr.status;
    }
    result.stats.iterations += sr.stats.iterations;

    double ext_gap = 0;
    for (int s : scc)
      for (int a = 0; a < g.num_actions(s); ++a)
        for (const auto& br : g.action(s, a).branches)
          if (comp_of[br.target] != static_cast<int>(c))
            ext_gap = std::max(ext_gap, acc_gap[comp_of[br.target]]);
    acc_gap[c] = own_gap + ext_gap;

    SccGapReport rep;
    rep.scc_index = static_cast<int>(c);
    rep.size = static_cast<int>(scc.size());
    rep.own_gap = own_gap;
    rep.accumulated_gap = acc_gap[c];
    result.stats.scc_gaps.push_back(rep);
    result.stats.accumulated_gap_bound = std::max(result.stats.accumulated_gap_bound, acc_gap[c]);

    for (size_t i = 0; i < scc.size(); ++i) {
      const int s = scc[i];
      const int li = static_cast<int>(i);
      result.values[s] = sr.values[li];
      if (cfg.exact_rational && sr.exact)
        solved[s] = (*sr.exact)[li];
      else
        solved[s] = Rational::from_double(sr.values[li]);
      if (result.exact) (*result.exact)[s] = solved[s];
      solved_mask[s] = 1;
      if (g.owner(s) == Owner::Maximizer)
        result.sigma.choice[s] = sr.sigma.choice[li];
      else
        result.tau.choice[s] = sr.tau.choice[li];
    }
  }

  result.status = all_converged ? SolveStatus::Converged : worst;
  return result;
}

}  // namespace sgs
