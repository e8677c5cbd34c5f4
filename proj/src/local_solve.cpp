#include <algorithm>
#include <cmath>

#include "sgs/mathprog.hpp"

namespace sgs {

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

void apply_pins(const MathProgram& prog, ValueVec& x) {
  for (int v = 0; v < prog.num_states; ++v)
    if (prog.pin[v]) x[v] = prog.pin[v]->to_double();
}

// Auxiliary variables are defined by their groups; groups are stored inner
// first, so one sweep resolves them.
void resolve_groups(const MathProgram& prog, ValueVec& x) {
  for (const auto& grp : prog.groups) {
    if (grp.target < prog.num_states) continue;
    double best = grp.operands[0].eval<double>(x);
    for (size_t k = 1; k < grp.operands.size(); ++k) {
      double v = grp.operands[k].eval<double>(x);
      best = grp.op == GroupOp::Max ? std::max(best, v) : std::min(best, v);
    }
    x[grp.target] = best;
  }
}

// One owner-consistent rounding pass: each unpinned state variable moves to
// its max/min action value, which repairs the player constraints the same
// way a Bellman update would.
void bellman_repair(const MathProgram& prog, ValueVec& x) {
  ValueVec next = x;
  for (int s = 0; s < prog.num_states; ++s) {
    if (prog.pin[s] || prog.action_exprs[s].empty()) continue;
    double best = prog.action_exprs[s][0].eval<double>(x);
    for (size_t a = 1; a < prog.action_exprs[s].size(); ++a) {
      double v = prog.action_exprs[s][a].eval<double>(x);
      best = prog.owner[s] == Owner::Maximizer ? std::max(best, v) : std::min(best, v);
    }
    next[s] = std::min(1.0, std::max(0.0, best));
  }
  x = std::move(next);
  apply_pins(prog, x);
  resolve_groups(prog, x);
}

double objective_value(const MathProgram& prog, const ValueVec& x) {
  double total = 0;
  for (const auto& term : prog.objective) {
    double p = 1;
    for (const auto& f : term.factors) p *= f.eval<double>(x);
    total += p;
  }
  return total;
}

void objective_gradient(const MathProgram& prog, const ValueVec& x, ValueVec& grad) {
  grad.setZero();
  std::vector<double> evals;
  for (const auto& term : prog.objective) {
    evals.clear();
    for (const auto& f : term.factors) evals.push_back(f.eval<double>(x));
    for (size_t i = 0; i < term.factors.size(); ++i) {
      double rest = 1;
      for (size_t j = 0; j < evals.size(); ++j)
        if (j != i) rest *= evals[j];
      if (rest == 0) continue;
      for (const auto& t : term.factors[i].terms) grad[t.var] += t.coeff.to_double() * rest;
    }
  }
}

}  // namespace

LocalSolveResult local_solve(const MathProgram& prog, const ValueVec* init,
                             const LocalSolveConfig& cfg) {
  Rng rng(cfg.seed);
  LocalSolveResult best;
  best.objective = std::numeric_limits<double>::infinity();
  best.state_values = ValueVec::Zero(prog.num_states);

  const int total_restarts = cfg.restarts + (init ? 1 : 0);
  for (int restart = 0; restart < total_restarts; ++restart) {
    ValueVec x(prog.num_vars());
    if (init && restart == 0) {
      for (int v = 0; v < prog.num_states; ++v) x[v] = std::min(1.0, std::max(0.0, (*init)[v]));
      for (int v = prog.num_states; v < prog.num_vars(); ++v) x[v] = 0;
    } else {
      for (int v = 0; v < prog.num_vars(); ++v) x[v] = rng.uniform();
    }
    apply_pins(prog, x);
    resolve_groups(prog, x);

    ValueVec grad(prog.num_vars());
    double step = 0.25;
    for (long round = 0; round < cfg.outer_rounds; ++round) {
      for (long it = 0; it < cfg.grad_steps; ++it) {
        objective_gradient(prog, x, grad);
        double before = objective_value(prog, x);
        ValueVec trial = x - step * grad;
        trial = trial.cwiseMax(0.0).cwiseMin(1.0);
        apply_pins(prog, trial);
        resolve_groups(prog, trial);
        if (objective_value(prog, trial) <= before) {
          x = std::move(trial);
          step = std::min(0.5, step * 1.25);
        } else {
          step = std::max(1e-4, step * 0.5);
        }
      }
      bellman_repair(prog, x);

      VerifyReport rep = verify_solution(prog, x.head(prog.num_states), cfg.tol);
      if (rep.pass) {
        LocalSolveResult out;
        out.state_values = x.head(prog.num_states);
        out.verified = true;
        out.objective = rep.objective;
        out.restarts_used = restart + 1;
        return out;
      }
      if (round + 1 == cfg.outer_rounds && rep.objective < best.objective) {
        best.objective = rep.objective;
        best.state_values = x.head(prog.num_states);
      }
    }
  }
  best.restarts_used = total_restarts;
  return best;
}

}  // namespace sgs
