#pragma once

#include <functional>
#include <vector>

#include "sgs/game.hpp"
#include "sgs/ssg_io.hpp"

namespace sgs::test {

// Figure game: Minimizer p -> Maximizer q -> {cycle back | fair 3-way coin
// between q, target t and sink o}. Values (1/2, 1/2, 1, 0).
inline const char* kFig1 = R"(states 4
initial 0
targets 2
owner 0 min
owner 1 max
owner 2 max
owner 3 min
action 0 a (1:1)
action 1 b (0:1)
action 1 c (1:1/3)(2:1/3)(3:1/3)
action 2 d (2:1)
action 3 e (3:1)
)";

inline StochasticGame fig1() { return parse_game(kFig1); }

// Calls fn for every strategy of `player`.
inline void for_each_strategy(const StochasticGame& g, Owner player,
                              const std::function<void(const Strategy&)>& fn) {
  std::vector<int> owned;
  for (int s = 0; s < g.num_states(); ++s)
    if (g.owner(s) == player) owned.push_back(s);
  Strategy st(player, g.num_states());
  for (int s : owned) st.choice[s] = 0;
  while (true) {
    fn(st);
    size_t i = 0;
    for (; i < owned.size(); ++i) {
      int s = owned[i];
      if (++st.choice[s] < g.num_actions(s)) break;
      st.choice[s] = 0;
    }
    if (i == owned.size()) break;
  }
}

}  // namespace sgs::test
