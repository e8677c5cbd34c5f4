#include "sgs/analysis.hpp"

#include <algorithm>
#include <deque>

#include "sgs/bellman.hpp"

namespace sgs {

namespace {

std::vector<std::vector<int>> predecessor_lists(const StochasticGame& g) {
  std::vector<std::vector<int>> preds(g.num_states());
  for (int s = 0; s < g.num_states(); ++s)
    for (int a = 0; a < g.num_actions(s); ++a)
      for (const auto& br : g.action(s, a).branches) preds[br.target].push_back(s);
  return preds;
}

// Iterative Tarjan over an explicit adjacency list. Components are emitted in
// completion order, which is a reverse topological order of the condensation.
std::vector<std::vector<int>> tarjan_sccs(const std::vector<std::vector<int>>& adj,
                                          const std::vector<char>* active = nullptr) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp_stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  struct Frame { int v; size_t edge; };
  std::vector<Frame> stack;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1 || (active && !(*active)[root])) continue;
    stack.push_back(Frame{root, 0});
    index[root] = low[root] = counter++;
    comp_stack.push_back(root);
    on_stack[root] = 1;

    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.edge < adj[f.v].size()) {
        int w = adj[f.v][f.edge++];
        if (active && !(*active)[w]) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          comp_stack.push_back(w);
          on_stack[w] = 1;
          stack.push_back(Frame{w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        int v = f.v;
        stack.pop_back();
        if (!stack.empty()) low[stack.back().v] = std::min(low[stack.back().v], low[v]);
        if (low[v] == index[v]) {
          std::vector<int> scc;
          while (true) {
            int w = comp_stack.back();
            comp_stack.pop_back();
            on_stack[w] = 0;
            scc.push_back(w);
            if (w == v) break;
          }
          std::sort(scc.begin(), scc.end());
          sccs.push_back(std::move(scc));
        }
      }
    }
  }
  return sccs;
}

}  // namespace

std::vector<int> mask_to_list(const std::vector<char>& mask) {
  std::vector<int> out;
  for (size_t s = 0; s < mask.size(); ++s)
    if (mask[s]) out.push_back(static_cast<int>(s));
  return out;
}

std::vector<char> compute_sinks(const StochasticGame& g) {
  auto preds = predecessor_lists(g);
  std::vector<char> reaches(g.num_states(), 0);
  std::deque<int> queue;
  for (int t : g.targets()) {
    reaches[t] = 1;
    queue.push_back(t);
  }
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int p : preds[s])
      if (!reaches[p]) {
        reaches[p] = 1;
        queue.push_back(p);
      }
  }
  std::vector<char> sinks(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) sinks[s] = !reaches[s];
  return sinks;
}

std::vector<std::vector<int>> scc_order(const StochasticGame& g) {
  std::vector<std::vector<int>> adj(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) {
    for (int a = 0; a < g.num_actions(s); ++a)
      for (const auto& br : g.action(s, a).branches) adj[s].push_back(br.target);
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }
  return tarjan_sccs(adj);
}

std::vector<Mec> mec_decomposition(const StochasticGame& g) {
  std::vector<std::vector<char>> allowed(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) allowed[s].assign(g.num_actions(s), 1);
  return mec_decomposition_restricted(g, allowed);
}

std::vector<Mec> mec_decomposition_restricted(const StochasticGame& g,
                                              const std::vector<std::vector<char>>& allowed_in) {
  const int n = g.num_states();
  auto allowed = allowed_in;
  std::vector<char> alive(n, 1);
  for (int s = 0; s < n; ++s)
    if (std::none_of(allowed[s].begin(), allowed[s].end(), [](char c) { return c; })) alive[s] = 0;

  std::vector<std::vector<int>> sccs;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<int>> adj(n);
    for (int s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      for (int a = 0; a < g.num_actions(s); ++a) {
        if (!allowed[s][a]) continue;
        for (const auto& br : g.action(s, a).branches)
          if (alive[br.target]) adj[s].push_back(br.target);
      }
      std::sort(adj[s].begin(), adj[s].end());
      adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
    }
    sccs = tarjan_sccs(adj, &alive);

    std::vector<int> comp(n, -1);
    for (size_t c = 0; c < sccs.size(); ++c)
      for (int s : sccs[c]) comp[s] = static_cast<int>(c);

    for (int s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      bool any = false;
      for (int a = 0; a < g.num_actions(s); ++a) {
        if (!allowed[s][a]) continue;
        bool stays = true;
        for (const auto& br : g.action(s, a).branches)
          if (!alive[br.target] || comp[br.target] != comp[s]) {
            stays = false;
            break;
          }
        if (!stays) {
          allowed[s][a] = 0;
          changed = true;
        } else {
          any = true;
        }
      }
      if (!any) {
        alive[s] = 0;
        changed = true;
      }
    }
  }

  std::vector<Mec> mecs;
  for (const auto& scc : sccs) {
    bool all_alive = std::all_of(scc.begin(), scc.end(), [&](int s) { return alive[s]; });
    if (!all_alive) continue;
    // A singleton is an EC only with a self-loop among its allowed actions.
    if (scc.size() == 1) {
      int s = scc[0];
      bool self = false;
      for (int a = 0; a < g.num_actions(s) && !self; ++a)
        if (allowed[s][a] && g.action(s, a).branches.size() == 1 &&
            g.action(s, a).branches[0].target == s)
          self = true;
      if (!self) continue;
    }
    Mec m;
    m.states = scc;
    for (int s : scc) {
      for (int a = 0; a < g.num_actions(s); ++a) {
        bool stays = true;
        for (const auto& br : g.action(s, a).branches)
          if (!std::binary_search(scc.begin(), scc.end(), br.target)) {
            stays = false;
            break;
          }
        if (stays && allowed_in[s][a])
          m.internal_actions.emplace_back(s, a);
        else if (!stays)
          m.exits.emplace_back(s, a);
      }
    }
    mecs.push_back(std::move(m));
  }
  return mecs;
}

int count_nontrivial_mecs(const StochasticGame& g, const std::vector<Mec>& mecs) {
  int n = 0;
  for (const auto& m : mecs) {
    if (m.states.size() > 1) {
      ++n;
      continue;
    }
    int s = m.states[0];
    // absorbing singleton: one self-loop action and nothing else
    bool absorbing = g.num_actions(s) == 1 && g.action(s, 0).branches.size() == 1 &&
                     g.action(s, 0).branches[0].target == s;
    if (!absorbing) ++n;
  }
  return n;
}

AttractorLayers reach_layers(const StochasticGame& g, const std::vector<char>& base) {
  const int n = g.num_states();
  AttractorLayers out;
  out.layer.assign(n, -1);
  for (int s = 0; s < n; ++s)
    if (base[s]) out.layer[s] = 0;

  bool grown = true;
  int round = 0;
  while (grown) {
    grown = false;
    ++round;
    for (int s = 0; s < n; ++s) {
      if (out.layer[s] != -1) continue;
      bool attracted;
      if (g.owner(s) == Owner::Maximizer) {
        attracted = false;
        for (int a = 0; a < g.num_actions(s) && !attracted; ++a)
          for (const auto& br : g.action(s, a).branches)
            if (out.layer[br.target] != -1 && out.layer[br.target] < round) {
              attracted = true;
              break;
            }
      } else {
        attracted = true;
        for (int a = 0; a < g.num_actions(s) && attracted; ++a) {
          bool touches = false;
          for (const auto& br : g.action(s, a).branches)
            if (out.layer[br.target] != -1 && out.layer[br.target] < round) {
              touches = true;
              break;
            }
          attracted = touches;
        }
      }
      if (attracted) {
        out.layer[s] = round;
        grown = true;
      }
    }
  }
  return out;
}

std::vector<char> zero_value_states(const StochasticGame& g) {
  auto layers = reach_layers(g, g.target_mask());
  std::vector<char> zero(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) zero[s] = layers.layer[s] == -1;
  return zero;
}

namespace {

// Base region for attractor construction: targets plus every value-zero
// state (which subsumes the graph sinks).
std::vector<char> attractor_base(const StochasticGame& g) {
  auto base = zero_value_states(g);
  for (int t : g.targets()) base[t] = 1;
  return base;
}

int pick_layer_action(const StochasticGame& g, const AttractorLayers& layers, int s,
                      const ValueVec* estimates) {
  const int my_layer = layers.layer[s];
  int best = -1;
  double best_value = -1;
  for (int a = 0; a < g.num_actions(s); ++a) {
    bool touches = false;
    for (const auto& br : g.action(s, a).branches)
      if (layers.layer[br.target] != -1 && layers.layer[br.target] < my_layer) {
        touches = true;
        break;
      }
    if (!touches) continue;
    if (!estimates) return a;  // lowest index
    double v = state_action_value(g, *estimates, s, a);
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

}  // namespace

Strategy attractor_strategy(const StochasticGame& g) {
  auto base = attractor_base(g);
  auto layers = reach_layers(g, base);
  Strategy sigma(Owner::Maximizer, g.num_states());
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Maximizer) continue;
    if (layers.layer[s] <= 0) {
      sigma.choice[s] = 0;  // inside the base; any choice is value-neutral
      continue;
    }
    int a = pick_layer_action(g, layers, s, nullptr);
    if (a < 0) throw SolverError("attractor: state " + std::to_string(s) + " has no layer action");
    sigma.choice[s] = a;
  }
  return sigma;
}

std::vector<char> trappable_region(const StochasticGame& g, const Strategy& sigma) {
  check_strategy(g, sigma);
  const int n = g.num_states();
  auto base = attractor_base(g);

  // Greatest set Y avoiding the base in which Maximizer's fixed choices stay
  // and Minimizer has some action staying.
  std::vector<char> in(n);
  for (int s = 0; s < n; ++s) in[s] = !base[s];
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (!in[s]) continue;
      bool stays;
      if (g.owner(s) == Owner::Maximizer) {
        stays = true;
        for (const auto& br : g.action(s, sigma.choice[s]).branches)
          if (!in[br.target]) {
            stays = false;
            break;
          }
      } else {
        stays = false;
        for (int a = 0; a < g.num_actions(s) && !stays; ++a) {
          bool all_in = true;
          for (const auto& br : g.action(s, a).branches)
            if (!in[br.target]) {
              all_in = false;
              break;
            }
          stays = all_in;
        }
      }
      if (!stays) {
        in[s] = 0;
        changed = true;
      }
    }
  }
  return in;
}

Strategy make_proper(const StochasticGame& g, const Strategy& candidate, const ValueVec* estimates) {
  auto trapped = trappable_region(g, candidate);
  if (mask_to_list(trapped).empty()) return candidate;

  auto base = attractor_base(g);
  auto layers = reach_layers(g, base);
  Strategy sigma = candidate;
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Maximizer || !trapped[s]) continue;
    int a = pick_layer_action(g, layers, s, estimates);
    if (a < 0) throw SolverError("make_proper: state " + std::to_string(s) + " has no layer action");
    sigma.choice[s] = a;
  }
  return sigma;
}

}  // namespace sgs
