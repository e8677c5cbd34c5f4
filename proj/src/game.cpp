#include "sgs/game.hpp"

#include <algorithm>
#include <set>

namespace sgs {

namespace {
const Rational kOne(1);
// Transitions below this are treated as a modelling error rather than noise.
const Rational kMinProb(1, 1000000000000000L);  // 1e-15
const Rational kSumTolerance(1, 1000000000000L);  // 1e-12
}  // namespace

StochasticGame::StochasticGame(std::vector<GameState> states, int initial, std::vector<int> targets) {
  GameBuilder b(static_cast<int>(states.size()));
  for (size_t s = 0; s < states.size(); ++s) {
    b.set_owner(static_cast<int>(s), states[s].owner);
    for (auto& a : states[s].actions) b.add_action(static_cast<int>(s), a.name, a.branches);
  }
  b.set_initial(initial);
  for (int t : targets) b.add_target(t);
  *this = std::move(b).build();
}

int StochasticGame::max_actions() const {
  int m = 0;
  for (const auto& st : states_) m = std::max(m, static_cast<int>(st.actions.size()));
  return m;
}

double StochasticGame::avg_actions() const {
  if (states_.empty()) return 0;
  return static_cast<double>(total_actions()) / static_cast<double>(states_.size());
}

long StochasticGame::total_actions() const {
  long n = 0;
  for (const auto& st : states_) n += static_cast<long>(st.actions.size());
  return n;
}

bool StochasticGame::satisfies_two_act() const {
  return std::all_of(states_.begin(), states_.end(),
                     [](const GameState& st) { return st.actions.size() <= 2; });
}

bool StochasticGame::is_mdp() const {
  return std::all_of(states_.begin(), states_.end(),
                     [](const GameState& st) { return st.owner == Owner::Maximizer; });
}

void StochasticGame::validate() const {
  const int n = num_states();
  if (n == 0) throw ValidationError("game has no states");
  if (initial_ < 0 || initial_ >= n)
    throw ValidationError("initial state " + std::to_string(initial_) + " out of range");
  if (targets_.empty()) throw ValidationError("no target declared");

  for (int s = 0; s < n; ++s) {
    const auto& st = states_[s];
    if (st.actions.empty())
      throw ValidationError("state " + std::to_string(s) + " has an empty action set");
    if (target_mask_[s]) {
      const bool loop = st.actions.size() == 1 && st.actions[0].branches.size() == 1 &&
                        st.actions[0].branches[0].target == s &&
                        st.actions[0].branches[0].prob == kOne;
      if (!loop)
        throw ValidationError("target state " + std::to_string(s) +
                              " must have a single probability-1 self-loop");
    }
    for (size_t a = 0; a < st.actions.size(); ++a) {
      const auto& act = st.actions[a];
      Rational sum(0);
      std::set<int> seen;
      for (const auto& br : act.branches) {
        if (br.target < 0 || br.target >= n)
          throw ValidationError("state " + std::to_string(s) + " action '" + act.name +
                                "' references unknown state " + std::to_string(br.target));
        if (!seen.insert(br.target).second)
          throw ValidationError("state " + std::to_string(s) + " action '" + act.name +
                                "' lists successor " + std::to_string(br.target) + " twice");
        if (br.prob < kMinProb)
          throw ValidationError("state " + std::to_string(s) + " action '" + act.name +
                                "' has a probability below 1e-15");
        if (br.prob > kOne)
          throw ValidationError("state " + std::to_string(s) + " action '" + act.name +
                                "' has a probability above 1");
        sum += br.prob;
      }
      if (sum != kOne)
        throw ValidationError("state " + std::to_string(s) + " action '" + act.name +
                              "' distribution sums to " + sum.str());
      (void)a;
    }
  }
}

GameBuilder::GameBuilder(int num_states)
    : states_(num_states), target_mask_(num_states, 0) {}

void GameBuilder::add_target(int s) {
  if (s < 0 || s >= num_states())
    throw ValidationError("target state " + std::to_string(s) + " out of range");
  if (!target_mask_[s]) {
    target_mask_[s] = 1;
    targets_.push_back(s);
  }
}

int GameBuilder::add_action(int s, std::string name, std::vector<Transition> branches) {
  states_[s].actions.push_back(GameAction{std::move(name), std::move(branches)});
  return static_cast<int>(states_[s].actions.size()) - 1;
}

int GameBuilder::add_state(Owner o) {
  states_.push_back(GameState{o, {}});
  target_mask_.push_back(0);
  return static_cast<int>(states_.size()) - 1;
}

StochasticGame GameBuilder::build() && {
  StochasticGame g;
  g.states_ = std::move(states_);
  g.initial_ = initial_;
  std::sort(targets_.begin(), targets_.end());
  g.targets_ = std::move(targets_);
  g.target_mask_ = std::move(target_mask_);

  // Distribution cleanup: renormalize exact near-1 sums (tolerance 1e-12),
  // so that stored distributions always sum to exactly 1.
  for (size_t s = 0; s < g.states_.size(); ++s) {
    for (auto& act : g.states_[s].actions) {
      Rational sum(0);
      for (const auto& br : act.branches) sum += br.prob;
      if (sum == kOne || sum.is_zero()) continue;
      if (abs(sum - kOne) > kSumTolerance)
        throw ValidationError("state " + std::to_string(s) + " action '" + act.name +
                              "' distribution sums to " + sum.str());
      for (auto& br : act.branches) {
        br.prob /= sum;
        br.prob_d = br.prob.to_double();
      }
    }
  }

  // Target self-loop normalization: any declared target actions are replaced
  // by one probability-1 self-loop.
  for (int t : g.targets_) {
    auto& st = g.states_[t];
    std::string name = st.actions.empty() ? std::string("loop") : st.actions[0].name;
    st.actions.clear();
    st.actions.push_back(GameAction{std::move(name), {Transition(t, Rational(1))}});
  }

  g.validate();
  return g;
}

void check_strategy(const StochasticGame& game, const Strategy& strategy) {
  if (static_cast<int>(strategy.choice.size()) != game.num_states())
    throw ValidationError("strategy size does not match game");
  for (int s = 0; s < game.num_states(); ++s) {
    if (game.owner(s) == strategy.player) {
      if (strategy.choice[s] < 0 || strategy.choice[s] >= game.num_actions(s))
        throw ValidationError("strategy has no valid choice at state " + std::to_string(s));
    } else if (strategy.choice[s] != -1) {
      throw ValidationError("strategy chooses at state " + std::to_string(s) +
                            " owned by the other player");
    }
  }
}

InducedChain induce(const StochasticGame& game, const Strategy& sigma, const Strategy& tau) {
  check_strategy(game, sigma);
  check_strategy(game, tau);
  if (sigma.player != Owner::Maximizer || tau.player != Owner::Minimizer)
    throw ValidationError("induce expects (Maximizer, Minimizer) strategies");
  InducedChain chain;
  chain.game = &game;
  chain.choice.resize(game.num_states());
  for (int s = 0; s < game.num_states(); ++s)
    chain.choice[s] = game.owner(s) == Owner::Maximizer ? sigma.choice[s] : tau.choice[s];
  return chain;
}

}  // namespace sgs
