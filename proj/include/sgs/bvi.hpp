#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <vector>

#include "sgs/bellman.hpp"
#include "sgs/game.hpp"

namespace sgs {

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

inline bool deadline_passed(const Deadline& d) {
  return d && std::chrono::steady_clock::now() > *d;
}

struct BviConfig {
  double eps = 1e-6;          // absolute per-state precision
  long deflate_period = 100;  // iterations between deflations; 0 = never
  long max_iterations = 10'000'000;
  bool guaranteed = true;     // false: plain lower value iteration
  // Fidelity switch: start from U == 1 everywhere instead of pinning the
  // graph sinks to 0. Convergence then relies on deflation alone.
  bool plain_upper_init = false;
  std::optional<ValueVec> warm_lower;  // known lower bound, e.g. from VI
  Deadline deadline;
  // Internal: extra stop predicate evaluated between iterations.
  std::function<bool(const Bounds&)> stop_hook;
};

/// Candidate simple end components for deflation: the MECs of the restricted
/// game in which every Minimizer state keeps only its actions minimizing the
/// current lower-bound action value. Components containing targets, and
/// components inside the sink region unless include_sink_components is set,
/// are dropped.
std::vector<std::vector<int>> find_secs(const StochasticGame& game, const ValueVec& lower,
                                        bool include_sink_components = false);

/// Lowers the upper bound of every member of every component to the
/// component's best Maximizer exit. Never increases an entry.
void deflate(const StochasticGame& game, ValueVec& upper,
             const std::vector<std::vector<int>>& secs, long* deflations = nullptr);

/// Bounded value iteration: monotone lower/upper Bellman iteration with
/// periodic deflation, stopping when U - L < eps everywhere.
SolveResult solve_bvi(const StochasticGame& game, const BviConfig& cfg = {});

/// Unguaranteed value iteration from below; stops when the largest
/// per-iteration change falls under eps. Useful for warm starts.
SolveResult solve_vi(const StochasticGame& game, const BviConfig& cfg = {});

}  // namespace sgs
