#pragma once

#include <utility>
#include <vector>

#include "sgs/game.hpp"

namespace sgs {

/// Sinks Z: states with no path to the target set in the underlying graph.
/// Computed by backward reachability from the targets, complemented.
std::vector<char> compute_sinks(const StochasticGame& game);

std::vector<int> mask_to_list(const std::vector<char>& mask);

/// One maximal end component: member states T, the internal actions B
/// (state-action pairs whose successors stay in T), and the exiting pairs
/// E^T = {(s,a) | s in T, Post(s,a) not a subset of T}.
struct Mec {
  std::vector<int> states;
  std::vector<std::pair<int, int>> internal_actions;
  std::vector<std::pair<int, int>> exits;
};

/// All maximal end components, by iterative SCC pruning. Includes the
/// trivial self-loop MECs of targets and sinks.
std::vector<Mec> mec_decomposition(const StochasticGame& game);

/// MEC decomposition of the restricted game in which state s may only use
/// actions a with allowed[s][a] set. States whose allowed set is empty take
/// part in no MEC.
std::vector<Mec> mec_decomposition_restricted(const StochasticGame& game,
                                              const std::vector<std::vector<char>>& allowed);

/// Number of MECs that are not a plain absorbing self-loop (i.e. exclude
/// singletons whose only internal action is a self-loop with no other
/// actions available -- targets, sinks and the like).
int count_nontrivial_mecs(const StochasticGame& game, const std::vector<Mec>& mecs);

/// Strongly connected components of the underlying graph (edge s->s' iff
/// some action moves s to s' with positive probability), in reverse
/// topological order: every SCC appears before the SCCs that can reach it,
/// i.e. successors first. Deterministic for deterministic input.
std::vector<std::vector<int>> scc_order(const StochasticGame& game);

/// Result of the layered backward reachability analysis used for attractor
/// construction. layer[s] = 0 on the base set, k > 0 for states attracted in
/// round k, and -1 for states Minimizer can keep away from the base forever.
struct AttractorLayers {
  std::vector<int> layer;
};

/// Layered backward fixpoint from `base`: a Maximizer state enters layer k
/// when some action reaches lower layers with positive probability, a
/// Minimizer state when every action does.
AttractorLayers reach_layers(const StochasticGame& game, const std::vector<char>& base);

/// States of value zero: Minimizer can keep the play away from the target
/// set forever. Superset of compute_sinks.
std::vector<char> zero_value_states(const StochasticGame& game);

/// Proper Maximizer strategy via backward BFS from the targets, sinks and
/// Minimizer-won region: a Maximizer state discovered in layer i picks the
/// lowest-indexed action that reaches layer < i with positive probability.
/// The induced play reaches that region almost surely against any opponent.
Strategy attractor_strategy(const StochasticGame& game);

/// Region of states from which Minimizer can keep the play inside
/// S \ (F + value-zero states) forever when Maximizer plays sigma.
/// Empty iff sigma is proper.
std::vector<char> trappable_region(const StochasticGame& game, const Strategy& sigma);

/// Repairs a candidate Maximizer strategy into a proper one: states inside
/// the trappable region are re-assigned via the attractor layering, breaking
/// layer ties toward the action of higher estimated value.
Strategy make_proper(const StochasticGame& game, const Strategy& candidate,
                     const ValueVec* estimates = nullptr);

}  // namespace sgs
