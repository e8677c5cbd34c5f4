#include "sgs/mathprog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sgs/chain.hpp"

namespace sgs {

void Affine::add(int var, const Rational& c) {
  if (c.is_zero()) return;
  auto it = std::lower_bound(terms.begin(), terms.end(), var,
                             [](const Term& t, int v) { return t.var < v; });
  if (it != terms.end() && it->var == var) {
    it->coeff += c;
    if (it->coeff.is_zero()) terms.erase(it);
  } else {
    terms.insert(it, Term{var, c});
  }
}

void Affine::add_scaled(const Affine& other, const Rational& scale) {
  if (scale.is_zero()) return;
  constant += other.constant * scale;
  for (const auto& t : other.terms) add(t.var, t.coeff * scale);
}

template <class Scalar>
Scalar Affine::eval(const Vec<Scalar>& x) const {
  Scalar acc;
  if constexpr (std::is_same_v<Scalar, Rational>)
    acc = constant;
  else
    acc = constant.to_double();
  for (const auto& t : terms) {
    if constexpr (std::is_same_v<Scalar, Rational>)
      acc += t.coeff * x[t.var];
    else
      acc += t.coeff.to_double() * x[t.var];
  }
  return acc;
}

template double Affine::eval<double>(const Vec<double>&) const;
template Rational Affine::eval<Rational>(const Vec<Rational>&) const;

int MathProgram::add_aux() {
  return num_states + num_aux++;
}

std::string MathProgram::var_name(int v) const {
  if (v < num_states) return "v_" + std::to_string(v);
  return "m_" + std::to_string(v - num_states);
}

int MathProgram::max_degree() const {
  int d = 0;
  for (const auto& t : objective) d = std::max(d, t.degree());
  return d;
}

Affine action_value_expr(const StochasticGame& g, int s, int a) {
  Affine e;
  for (const auto& br : g.action(s, a).branches) e.add(br.target, br.prob);
  return e;
}

TwoActResult transform_2act(const StochasticGame& g) {
  GameBuilder b(g.num_states());
  b.set_initial(g.initial());
  for (int t : g.targets()) b.add_target(t);
  for (int s = 0; s < g.num_states(); ++s) b.set_owner(s, g.owner(s));

  for (int s = 0; s < g.num_states(); ++s) {
    const int k = g.num_actions(s);
    if (k <= 2) {
      for (const auto& act : g.actions(s)) b.add_action(s, act.name, act.branches);
      continue;
    }
    // Balanced tree over the action range; a range of size 1 is attached as
    // the original action, ranges of size 2 become leaf nodes. k-1 nodes.
    auto build = [&](auto&& self, int node, int lo, int hi) -> void {
      const int size = hi - lo;
      if (size <= 2) {
        for (int a = lo; a < hi; ++a)
          b.add_action(node, g.action(s, a).name, g.action(s, a).branches);
        return;
      }
      const int mid = lo + (size + 1) / 2;
      const int left_size = mid - lo;
      if (left_size == 1) {
        b.add_action(node, g.action(s, lo).name, g.action(s, lo).branches);
      } else {
        int child = b.add_state(g.owner(s));
        b.add_action(node, "t" + std::to_string(lo) + "_" + std::to_string(mid),
                     {Transition(child, Rational(1))});
        self(self, child, lo, mid);
      }
      const int right_size = hi - mid;
      if (right_size == 1) {
        b.add_action(node, g.action(s, mid).name, g.action(s, mid).branches);
      } else {
        int child = b.add_state(g.owner(s));
        b.add_action(node, "t" + std::to_string(mid) + "_" + std::to_string(hi),
                     {Transition(child, Rational(1))});
        self(self, child, mid, hi);
      }
    };
    build(build, s, 0, k);
  }

  TwoActResult out{std::move(b).build(), g.num_states()};
  return out;
}

StoppingResult transform_stopping(const StochasticGame& g, const Rational& eps_stop) {
  if (!(Rational(0) < eps_stop) || !(eps_stop < Rational(1)))
    throw PreconditionError("transform_stopping: eps must lie in (0,1)");

  StoppingResult out;
  const int n = g.num_states();
  out.sink = n;
  // eps must stay strictly below (1/4)^|S| for the value rounding argument,
  // which floats cannot honor beyond a couple dozen states.
  out.precision_warning =
      static_cast<double>(n) * std::log(4.0) + std::log(eps_stop.to_double()) >= 0;

  GameBuilder b(n + 1);
  b.set_initial(g.initial());
  for (int t : g.targets()) b.add_target(t);
  const Rational scale = Rational(1) - eps_stop;
  for (int s = 0; s < n; ++s) {
    b.set_owner(s, g.owner(s));
    for (const auto& act : g.actions(s)) {
      if (g.is_target(s)) {
        b.add_action(s, act.name, act.branches);
        continue;
      }
      std::vector<Transition> branches;
      for (const auto& br : act.branches) branches.emplace_back(br.target, br.prob * scale);
      branches.emplace_back(out.sink, eps_stop);
      b.add_action(s, act.name, std::move(branches));
    }
  }
  b.set_owner(out.sink, Owner::Minimizer);
  b.add_action(out.sink, "stop", {Transition(out.sink, Rational(1))});
  out.game = std::move(b).build();
  return out;
}

namespace {

double mec_pair_count(const StochasticGame& g, const Mec& mec) {
  double count = 1;
  for (int s : mec.states) count *= g.num_actions(s);
  return count;
}

// Absorption probabilities toward each exit pair for one strategy
// assignment on the component: row t, column e.
Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> exit_probabilities(
    const StochasticGame& g, const Mec& mec, const std::vector<int>& local_choice,
    const std::vector<int>& local_of) {
  const int k = static_cast<int>(mec.states.size());
  const int ne = static_cast<int>(mec.exits.size());

  // exit index chosen at t, or -1 when the chosen action stays internal
  std::vector<int> absorbs(k, -1);
  for (int i = 0; i < k; ++i) {
    const int s = mec.states[i];
    const int a = local_choice[i];
    for (int e = 0; e < ne; ++e)
      if (mec.exits[e].first == s && mec.exits[e].second == a) {
        absorbs[i] = e;
        break;
      }
  }

  // states that can reach some absorbing pair under this assignment
  std::vector<char> reaches(k, 0);
  bool grown = true;
  while (grown) {
    grown = false;
    for (int i = 0; i < k; ++i) {
      if (reaches[i]) continue;
      bool r = absorbs[i] >= 0;
      if (!r) {
        const int s = mec.states[i];
        for (const auto& br : g.action(s, local_choice[i]).branches)
          if (reaches[local_of[br.target]]) {
            r = true;
            break;
          }
      }
      if (r) {
        reaches[i] = 1;
        grown = true;
      }
    }
  }

  Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> probs(k, ne);
  probs.setConstant(Rational(0));

  std::vector<int> sys_index(k, -1);
  int m = 0;
  for (int i = 0; i < k; ++i)
    if (reaches[i] && absorbs[i] < 0) sys_index[i] = m++;

  // direct absorption rows
  for (int i = 0; i < k; ++i)
    if (absorbs[i] >= 0) probs(i, absorbs[i]) = Rational(1);

  if (m > 0) {
    Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> A(m, m);
    A.setConstant(Rational(0));
    Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> R(m, ne);
    R.setConstant(Rational(0));
    for (int i = 0; i < k; ++i) {
      if (sys_index[i] < 0) continue;
      const int row = sys_index[i];
      A(row, row) = Rational(1);
      const int s = mec.states[i];
      for (const auto& br : g.action(s, local_choice[i]).branches) {
        const int j = local_of[br.target];
        if (!reaches[j]) continue;  // mass that cycles forever contributes 0
        if (absorbs[j] >= 0)
          R(row, absorbs[j]) += br.prob;
        else
          A(row, sys_index[j]) -= br.prob;
      }
    }
    // one elimination, ne right-hand sides
    for (int e = 0; e < ne; ++e) {
      RationalVec x = solve_linear_exact(A, R.col(e));
      for (int i = 0; i < k; ++i)
        if (sys_index[i] >= 0) probs(i, e) = x[sys_index[i]];
    }
  }
  return probs;
}

}  // namespace

void append_mec_constraints(MathProgram& prog, const StochasticGame& g, const Mec& mec,
                            double pair_budget) {
  const int k = static_cast<int>(mec.states.size());
  bool has_max = false, has_min = false;
  for (int s : mec.states) (g.owner(s) == Owner::Maximizer ? has_max : has_min) = true;

  // Minimizer-only component: staying forever is optimal, value 0.
  if (!has_max) {
    for (int s : mec.states)
      if (!prog.pin[s]) prog.pin[s] = Rational(0);
    return;
  }

  // Maximizer-only component: every member equals the best exit.
  if (!has_min) {
    std::vector<Affine> operands;
    for (const auto& [s, a] : mec.exits) operands.push_back(action_value_expr(g, s, a));
    for (int s : mec.states) {
      if (operands.size() == 1) {
        Constraint c;
        c.expr = operands[0];
        c.expr.add(s, Rational(-1));
        c.rel = Rel::Eq;
        prog.constraints.push_back(std::move(c));
      } else {
        prog.groups.push_back(Group{s, GroupOp::Max, operands});
      }
    }
    return;
  }

  double pairs = mec_pair_count(g, mec);
  if (pairs > pair_budget) {
    std::ostringstream msg;
    msg << "end component of size " << k << " needs " << pairs
        << " strategy pairs, over the budget of " << pair_budget;
    throw EncodingInfeasibleError(msg.str(), pairs);
  }

  std::vector<int> local_of(g.num_states(), -1);
  std::vector<int> max_members, min_members;
  for (int i = 0; i < k; ++i) {
    local_of[mec.states[i]] = i;
    (g.owner(mec.states[i]) == Owner::Maximizer ? max_members : min_members).push_back(i);
  }

  std::vector<Affine> exit_exprs;
  for (const auto& [s, a] : mec.exits) exit_exprs.push_back(action_value_expr(g, s, a));

  auto advance = [&](std::vector<int>& choice, const std::vector<int>& members) {
    for (int i : members) {
      if (++choice[i] < g.num_actions(mec.states[i])) return true;
      choice[i] = 0;
    }
    return false;
  };

  // value expressions per member, per Maximizer assignment: min over the
  // Minimizer assignments of sum_e p_e(t) * val(exit_e)
  std::vector<std::vector<Affine>> per_sigma(k);
  std::vector<int> choice(k, 0);
  do {
    std::vector<std::vector<Affine>> per_tau(k);
    do {
      auto probs = exit_probabilities(g, mec, choice, local_of);
      for (int i = 0; i < k; ++i) {
        Affine val;
        for (int e = 0; e < static_cast<int>(mec.exits.size()); ++e)
          if (!probs(i, e).is_zero()) val.add_scaled(exit_exprs[e], probs(i, e));
        per_tau[i].push_back(std::move(val));
      }
    } while (advance(choice, min_members));

    for (int i = 0; i < k; ++i) {
      if (per_tau[i].size() == 1) {
        per_sigma[i].push_back(std::move(per_tau[i][0]));
      } else {
        int aux = prog.add_aux();
        prog.groups.push_back(Group{aux, GroupOp::Min, std::move(per_tau[i])});
        Affine ref;
        ref.add(aux, Rational(1));
        per_sigma[i].push_back(std::move(ref));
      }
    }
  } while (advance(choice, max_members));

  for (int i = 0; i < k; ++i) {
    const int s = mec.states[i];
    if (per_sigma[i].size() == 1) {
      Constraint c;
      c.expr = per_sigma[i][0];
      c.expr.add(s, Rational(-1));
      c.rel = Rel::Eq;
      prog.constraints.push_back(std::move(c));
    } else {
      prog.groups.push_back(Group{s, GroupOp::Max, std::move(per_sigma[i])});
    }
  }
}

MathProgram encode_hop(const StochasticGame& g, double pair_budget) {
  const int n = g.num_states();
  MathProgram prog;
  prog.num_states = n;
  prog.owner.resize(n);
  prog.pin.assign(n, std::nullopt);
  prog.action_exprs.resize(n);

  auto sinks = compute_sinks(g);
  auto mecs = mec_decomposition(g);
  // Components needing constraint groups; Minimizer-only ones join the sink
  // pins instead (staying forever is optimal there).
  std::vector<const Mec*> constrained;
  std::vector<char> zero_pin = sinks;
  for (const auto& mec : mecs) {
    bool has_target = std::any_of(mec.states.begin(), mec.states.end(),
                                  [&](int s) { return g.is_target(s); });
    if (has_target || sinks[mec.states.front()]) continue;
    bool has_max = std::any_of(mec.states.begin(), mec.states.end(),
                               [&](int s) { return g.owner(s) == Owner::Maximizer; });
    if (!has_max)
      for (int s : mec.states) zero_pin[s] = 1;
    else
      constrained.push_back(&mec);
  }

  for (int s = 0; s < n; ++s) {
    prog.owner[s] = g.owner(s);
    for (int a = 0; a < g.num_actions(s); ++a)
      prog.action_exprs[s].push_back(action_value_expr(g, s, a));
    if (g.is_target(s))
      prog.pin[s] = Rational(1);
    else if (zero_pin[s])
      prog.pin[s] = Rational(0);
  }

  for (int s = 0; s < n; ++s) {
    if (prog.pin[s]) continue;
    const int k = g.num_actions(s);
    if (k == 1) {
      Constraint c;
      c.expr = prog.action_exprs[s][0];
      c.expr.add(s, Rational(-1));
      c.rel = Rel::Eq;
      prog.constraints.push_back(std::move(c));
      continue;
    }
    ProductTerm term;
    for (int a = 0; a < k; ++a) {
      Affine f;
      f.add(s, Rational(1));
      f.add_scaled(prog.action_exprs[s][a], Rational(-1));
      term.factors.push_back(std::move(f));
    }
    if (k % 2 == 1) term.factors.push_back(term.factors[0]);  // keep summands non-negative
    prog.objective.push_back(std::move(term));

    for (int a = 0; a < k; ++a) {
      Constraint c;
      c.expr.add(s, Rational(1));
      c.expr.add_scaled(prog.action_exprs[s][a], Rational(-1));
      c.rel = g.owner(s) == Owner::Maximizer ? Rel::Ge : Rel::Le;
      prog.constraints.push_back(std::move(c));
    }
  }

  for (const Mec* mec : constrained) append_mec_constraints(prog, g, *mec, pair_budget);
  return prog;
}

MathProgram encode_qp(const StochasticGame& g, double pair_budget) {
  if (!g.satisfies_two_act())
    throw PreconditionError(
        "encode_qp: a state has more than two actions; run transform_2act first");
  return encode_hop(g, pair_budget);
}

}  // namespace sgs
