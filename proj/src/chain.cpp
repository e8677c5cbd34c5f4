#include "sgs/chain.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <deque>

namespace sgs {

namespace {

// Qualitative classification for the chain: 0 = value 0 (no path to target),
// 1 = value 1 (cannot reach the 0-region), 2 = needs the linear system.
std::vector<int> classify(const StochasticGame& g, const std::vector<int>& choice,
                          const std::vector<char>& targets) {
  const int n = g.num_states();
  // Reaching a target ends the play: target states act as absorbing here
  // even when the mask marks non-absorbing states.
  std::vector<std::vector<int>> preds(n);
  for (int s = 0; s < n; ++s) {
    if (targets[s]) continue;
    for (const auto& br : g.action(s, choice[s]).branches) preds[br.target].push_back(s);
  }

  std::vector<char> reach_target(n, 0);
  std::deque<int> queue;
  for (int s = 0; s < n; ++s)
    if (targets[s]) {
      reach_target[s] = 1;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int p : preds[s])
      if (!reach_target[p]) {
        reach_target[p] = 1;
        queue.push_back(p);
      }
  }

  // value-1 = states that cannot reach the value-0 region
  std::vector<char> reach_zero(n, 0);
  for (int s = 0; s < n; ++s)
    if (!reach_target[s]) {
      reach_zero[s] = 1;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int p : preds[s])
      if (!reach_zero[p]) {
        reach_zero[p] = 1;
        queue.push_back(p);
      }
  }

  std::vector<int> cls(n);
  for (int s = 0; s < n; ++s) cls[s] = !reach_target[s] ? 0 : (!reach_zero[s] ? 1 : 2);
  return cls;
}

}  // namespace

RationalVec solve_linear_exact(Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> A,
                               RationalVec b) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (!A(r, col).is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) throw SolverError("exact linear solve: singular system");
    if (pivot != col) {
      A.row(pivot).swap(A.row(col));
      std::swap(b[pivot], b[col]);
    }
    Rational inv = Rational(1) / A(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (A(r, col).is_zero()) continue;
      Rational f = A(r, col) * inv;
      for (int c = col; c < n; ++c) A(r, c) -= f * A(col, c);
      b[r] -= f * b[col];
    }
  }
  RationalVec x(n);
  for (int r = n - 1; r >= 0; --r) {
    Rational acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A(r, c) * x[c];
    x[r] = acc / A(r, r);
  }
  return x;
}

ValueVec chain_reach(const StochasticGame& g, const std::vector<int>& choice,
                     const std::vector<char>& targets, ChainSolveStats* stats) {
  const int n = g.num_states();
  auto cls = classify(g, choice, targets);
  ValueVec values(n);
  std::vector<int> sys_index(n, -1);
  int m = 0;
  for (int s = 0; s < n; ++s) {
    if (cls[s] == 2) sys_index[s] = m++;
    values[s] = cls[s] == 1 ? 1.0 : 0.0;
  }
  if (stats) stats->unknowns = m;
  if (m == 0) return values;

  // (I - P) x = b restricted to the unknown states
  Eigen::SparseMatrix<double> A(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  std::vector<Eigen::Triplet<double>> trips;
  for (int s = 0; s < n; ++s) {
    if (cls[s] != 2) continue;
    int row = sys_index[s];
    double diag = 1.0;
    for (const auto& br : g.action(s, choice[s]).branches) {
      if (cls[br.target] == 2) {
        if (br.target == s)
          diag -= br.prob_d;
        else
          trips.emplace_back(row, sys_index[br.target], -br.prob_d);
      } else if (cls[br.target] == 1) {
        b[row] += br.prob_d;
      }
    }
    trips.emplace_back(row, row, diag);
  }
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("chain solve: singular linear system (float round-off)");
  Eigen::VectorXd x = lu.solve(b);
  double residual = (A * x - b).cwiseAbs().maxCoeff();
  if (stats) stats->residual = residual;
  if (!x.allFinite())
    throw SolverError("chain solve: non-finite solution, residual " + std::to_string(residual));

  for (int s = 0; s < n; ++s)
    if (cls[s] == 2) values[s] = std::min(1.0, std::max(0.0, x[sys_index[s]]));
  return values;
}

RationalVec chain_reach_exact(const StochasticGame& g, const std::vector<int>& choice,
                              const std::vector<char>& targets) {
  const int n = g.num_states();
  auto cls = classify(g, choice, targets);
  RationalVec values(n);
  std::vector<int> sys_index(n, -1);
  int m = 0;
  for (int s = 0; s < n; ++s) {
    if (cls[s] == 2) sys_index[s] = m++;
    values[s] = Rational(cls[s] == 1 ? 1 : 0);
  }
  if (m == 0) return values;

  Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic> A(m, m);
  A.setConstant(Rational(0));
  RationalVec b(m);
  b.setConstant(Rational(0));
  for (int s = 0; s < n; ++s) {
    if (cls[s] != 2) continue;
    int row = sys_index[s];
    A(row, row) = Rational(1);
    for (const auto& br : g.action(s, choice[s]).branches) {
      if (cls[br.target] == 2)
        A(row, sys_index[br.target]) -= br.prob;
      else if (cls[br.target] == 1)
        b[row] += br.prob;
    }
  }
  RationalVec x = solve_linear_exact(std::move(A), std::move(b));
  for (int s = 0; s < n; ++s)
    if (cls[s] == 2) values[s] = x[sys_index[s]];
  return values;
}

ValueVec induce_and_solve(const StochasticGame& g, const Strategy& sigma, const Strategy& tau,
                          const std::vector<char>& targets, ChainSolveStats* stats) {
  return chain_reach(g, induce(g, sigma, tau).choice, targets, stats);
}

RationalVec induce_and_solve_exact(const StochasticGame& g, const Strategy& sigma,
                                   const Strategy& tau, const std::vector<char>& targets) {
  return chain_reach_exact(g, induce(g, sigma, tau).choice, targets);
}

}  // namespace sgs
