#pragma once

#include <cstdint>

#include "sgs/game.hpp"

namespace sgs {

/// Chain of m three-state end components. Each block has a Maximizer state
/// that can cycle or take the probabilistic exit toward the next block
/// (9/10 onward, 1/10 to the global sink), a Minimizer state and a
/// probabilistic connector, all cycling inside the block. The chain ends in
/// one target and one sink: 3m+2 states, m non-trivial MECs, and block i
/// (0-based) has exact value (9/10)^(m-i).
StochasticGame gen_mulmec(int m);

/// One large end component of 2n+1 alternating Maximizer/Minimizer states
/// arranged in a cycle, plus target and sink (2n+3 states). State 0 owns the
/// only exit, a fair coin between target and sink, so every member of the
/// component has value 1/2.
StochasticGame gen_bigmec(int n);

/// Single-action adversarial chain model of 2n+1 states: two symmetric
/// fair-coin ladders from the initial state, one absorbing into the target
/// and one into the sink, restarting at the initial state on every failed
/// step. The initial value is exactly 1/2 while the per-round absorption
/// probability is 2^-(n-1), which starves value iteration.
StochasticGame gen_hm(int n);

struct RandomGameParams {
  std::uint64_t seed = 1;
  int n_states = 6;
  int max_actions = 3;
  int max_branching = 3;
  double minimizer_fraction = 0.4;
  double target_fraction = 0.2;
};

/// Seeded, reproducible random game with small-denominator rational
/// probabilities and at least one target. Uses an internal generator so the
/// same seed yields the same game on every platform.
StochasticGame gen_random(const RandomGameParams& params);

}  // namespace sgs
