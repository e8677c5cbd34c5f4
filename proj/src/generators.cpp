#include "sgs/generators.hpp"

#include <algorithm>
#include <string>

namespace sgs {

StochasticGame gen_mulmec(int m) {
  if (m < 1) throw ValidationError("gen_mulmec: m must be >= 1");
  const int n = 3 * m + 2;
  const int target = 3 * m;
  const int sink = 3 * m + 1;
  GameBuilder b(n);
  b.set_initial(0);
  b.add_target(target);
  for (int i = 0; i < m; ++i) {
    const int a = 3 * i, mi = 3 * i + 1, c = 3 * i + 2;
    const int next = i + 1 < m ? 3 * (i + 1) : target;
    b.set_owner(a, Owner::Maximizer);
    b.set_owner(mi, Owner::Minimizer);
    b.set_owner(c, Owner::Minimizer);
    b.add_action(a, "cyc", {Transition(mi, Rational(1))});
    b.add_action(a, "exit", {Transition(next, Rational(9, 10)), Transition(sink, Rational(1, 10))});
    b.add_action(mi, "cyc", {Transition(c, Rational(1))});
    b.add_action(mi, "jmp", {Transition(a, Rational(1))});
    b.add_action(c, "cyc", {Transition(a, Rational(1))});
    b.add_action(c, "mix", {Transition(a, Rational(1, 2)), Transition(mi, Rational(1, 2))});
  }
  b.set_owner(target, Owner::Maximizer);
  b.set_owner(sink, Owner::Minimizer);
  b.add_action(target, "done", {Transition(target, Rational(1))});
  b.add_action(sink, "stuck", {Transition(sink, Rational(1))});
  return std::move(b).build();
}

StochasticGame gen_bigmec(int n) {
  if (n < 1) throw ValidationError("gen_bigmec: n must be >= 1");
  const int cycle = 2 * n + 1;
  const int target = cycle;
  const int sink = cycle + 1;
  GameBuilder b(cycle + 2);
  b.set_initial(0);
  b.add_target(target);
  for (int j = 0; j < cycle; ++j) {
    b.set_owner(j, j % 2 == 0 ? Owner::Maximizer : Owner::Minimizer);
    const int fwd = (j + 1) % cycle;
    b.add_action(j, "fwd", {Transition(fwd, Rational(1))});
    if (j == 0) {
      b.add_action(j, "exit",
                   {Transition(target, Rational(1, 2)), Transition(sink, Rational(1, 2))});
    } else {
      b.add_action(j, "mix",
                   {Transition(j - 1, Rational(1, 2)), Transition(fwd, Rational(1, 2))});
    }
  }
  b.set_owner(target, Owner::Maximizer);
  b.set_owner(sink, Owner::Minimizer);
  b.add_action(target, "done", {Transition(target, Rational(1))});
  b.add_action(sink, "stuck", {Transition(sink, Rational(1))});
  return std::move(b).build();
}

StochasticGame gen_hm(int n) {
  if (n < 1) throw ValidationError("gen_hm: n must be >= 1");
  // states: 0 = initial; 1..n-1 the target-side ladder; n..2n-2 the
  // sink-side ladder; 2n-1 = target; 2n = sink.
  const int target = 2 * n - 1;
  const int sink = 2 * n;
  GameBuilder b(2 * n + 1);
  b.set_initial(0);
  b.add_target(target);
  for (int s = 0; s <= sink; ++s) b.set_owner(s, Owner::Maximizer);

  const Rational half(1, 2);
  auto ladder = [&](int first, int last, int absorb) {
    // first..last climb toward absorb, falling back to the initial state
    for (int s = first; s <= last; ++s) {
      int up = s == last ? absorb : s + 1;
      b.add_action(s, "step", {Transition(up, half), Transition(0, half)});
    }
  };
  if (n == 1) {
    b.add_action(0, "step", {Transition(target, half), Transition(sink, half)});
  } else {
    b.add_action(0, "step", {Transition(1, half), Transition(n, half)});
    ladder(1, n - 1, target);
    ladder(n, 2 * n - 2, sink);
  }
  b.add_action(target, "done", {Transition(target, Rational(1))});
  b.add_action(sink, "stuck", {Transition(sink, Rational(1))});
  return std::move(b).build();
}

namespace {

// SplitMix64: platform-independent reproducibility matters more than quality.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  int below(int k) { return static_cast<int>(next() % static_cast<std::uint64_t>(k)); }
  bool chance(double p) { return next() % 1000000 < static_cast<std::uint64_t>(p * 1000000); }
};

}  // namespace

StochasticGame gen_random(const RandomGameParams& p) {
  if (p.n_states < 2) throw ValidationError("gen_random: need at least 2 states");
  if (p.max_actions < 1 || p.max_branching < 1)
    throw ValidationError("gen_random: action and branching bounds must be positive");
  Rng rng(p.seed);
  const int n = p.n_states;
  GameBuilder b(n);
  b.set_initial(0);

  int n_targets = std::max(1, static_cast<int>(p.target_fraction * n + 0.5));
  std::vector<char> is_target(n, 0);
  for (int k = 0; k < n_targets; ++k) {
    int t = rng.below(n);
    while (is_target[t]) t = (t + 1) % n;
    is_target[t] = 1;
    b.add_target(t);
  }

  for (int s = 0; s < n; ++s) {
    b.set_owner(s, rng.chance(p.minimizer_fraction) ? Owner::Minimizer : Owner::Maximizer);
    if (is_target[s]) {
      b.add_action(s, "a0", {Transition(s, Rational(1))});
      continue;
    }
    int n_actions = 1 + rng.below(p.max_actions);
    for (int a = 0; a < n_actions; ++a) {
      int n_branches = std::min(n, 1 + rng.below(p.max_branching));
      std::vector<int> succs;
      for (int k = 0; k < n_branches; ++k) {
        int t = rng.below(n);
        while (std::find(succs.begin(), succs.end(), t) != succs.end()) t = (t + 1) % n;
        succs.push_back(t);
      }
      std::vector<long> weights(succs.size());
      long total = 0;
      for (auto& w : weights) {
        w = 1 + rng.below(4);
        total += w;
      }
      std::vector<Transition> branches;
      for (size_t k = 0; k < succs.size(); ++k)
        branches.emplace_back(succs[k], Rational(weights[k], total));
      b.add_action(s, "a" + std::to_string(a), std::move(branches));
    }
  }
  return std::move(b).build();
}

}  // namespace sgs
