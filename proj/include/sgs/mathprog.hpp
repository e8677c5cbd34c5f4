#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgs/analysis.hpp"
#include "sgs/game.hpp"

namespace sgs {

/// Sparse affine expression c0 + sum of coeff * var over program variables.
struct Affine {
  Rational constant;
  struct Term {
    int var;
    Rational coeff;
    bool operator==(const Term&) const = default;
  };
  std::vector<Term> terms;  // sorted by var index, no zero coefficients

  void add(int var, const Rational& c);
  void add_constant(const Rational& c) { constant += c; }
  void add_scaled(const Affine& other, const Rational& scale);

  template <class Scalar>
  Scalar eval(const Vec<Scalar>& x) const;

  bool operator==(const Affine&) const = default;
};

/// Product of affine factors; contributes the product to the objective.
struct ProductTerm {
  std::vector<Affine> factors;
  int degree() const { return static_cast<int>(factors.size()); }
};

enum class Rel { Le, Eq, Ge };

/// Linear constraint expr REL 0.
struct Constraint {
  Affine expr;
  Rel rel = Rel::Eq;
};

enum class GroupOp { Max, Min };

/// target = max/min over affine operands; emitted with big-M rows and one
/// binary per operand in the lp-style format.
struct Group {
  int target = -1;
  GroupOp op = GroupOp::Max;
  std::vector<Affine> operands;
};

/// Mathematical program over one continuous [0,1] variable per game state
/// plus auxiliary variables introduced for nested max/min groups.
/// Variables are named v_<state> and m_<k>.
struct MathProgram {
  int num_states = 0;
  int num_aux = 0;
  std::vector<Owner> owner;                        // per state var
  std::vector<std::optional<Rational>> pin;        // per var; targets 1, sinks 0
  std::vector<std::vector<Affine>> action_exprs;   // per state var: val(s,a)
  std::vector<ProductTerm> objective;
  std::vector<Constraint> constraints;
  std::vector<Group> groups;  // dependency order: inner groups first

  int num_vars() const { return num_states + num_aux; }
  int add_aux();
  std::string var_name(int v) const;
  int max_degree() const;
};

/// Affine form of val(s,a) over the state variables.
Affine action_value_expr(const StochasticGame& game, int s, int a);

struct TwoActResult {
  StochasticGame game;
  // Original states keep their indices; the tree states appended behind them
  // belong to the original state num_original is derived from.
  int num_original = 0;
};

/// Splits every state with more than two actions into a balanced binary tree
/// of same-owner states (k-1 tree states for k actions) whose leaves carry
/// the original actions. Values of original states are preserved exactly.
TwoActResult transform_2act(const StochasticGame& game);

struct StoppingResult {
  StochasticGame game;
  int sink = -1;             // the designated fresh sink
  bool precision_warning = false;  // eps_stop >= (1/4)^|S|
};

/// Redirects eps_stop of every non-target action's mass to a fresh sink,
/// scaling the rest by (1 - eps_stop). The result has no end components
/// besides the absorbing target/sink loops; values drop below the original
/// ones and converge to them as eps_stop -> 0.
StoppingResult transform_stopping(const StochasticGame& game, const Rational& eps_stop);

/// Default bound on the strategy pairs enumerated per end component.
inline constexpr double kDefaultPairBudget = 1e6;

/// Constraint groups fixing the values of one end component (the max over
/// Maximizer strategies of the min over Minimizer strategies of the
/// exit-weighted value expressions). Appends auxiliary variables, groups and
/// equality constraints to the program. Throws EncodingInfeasibleError when
/// the component's strategy-pair count exceeds the budget.
void append_mec_constraints(MathProgram& prog, const StochasticGame& game, const Mec& mec,
                            double pair_budget = kDefaultPairBudget);

/// Product-form objective encoding for arbitrary games: per multi-action
/// state a product term over all actions (the first factor duplicated for
/// odd action counts), player inequalities, single-action equalities,
/// target/sink pins, and end-component constraint groups.
MathProgram encode_hop(const StochasticGame& game, double pair_budget = kDefaultPairBudget);

/// Quadratic variant; requires the 2Act property and rejects other games
/// with PreconditionError pointing to transform_2act.
MathProgram encode_qp(const StochasticGame& game, double pair_budget = kDefaultPairBudget);

struct VerifyReport {
  double objective = 0;
  double max_residual = 0;
  bool pass = false;
  std::vector<int> group_choice;          // selected operand per group
  std::vector<std::string> violations;    // human-readable residual list
  std::string text() const;
};

/// Checks a candidate value assignment: resolves auxiliary variables through
/// their groups, then reports the objective value and the largest constraint,
/// pin, and group residual. Passes iff objective <= tol and residuals <= tol.
VerifyReport verify_solution(const MathProgram& prog, const ValueVec& state_values, double tol);

/// Exact variant; residual and objective tests are exact rational
/// comparisons against the tolerance.
VerifyReport verify_solution_exact(const MathProgram& prog, const RationalVec& state_values,
                                   const Rational& tol);

enum class ProgramFormat { LpStyle, Native };

/// Deterministic textual emission. The native format round-trips through
/// parse_native_program byte-identically; the lp-style format expands
/// max/min groups into big-M rows with binaries b_<group>_<k> and requires
/// all product terms to be quadratic at most.
std::string emit_program(const MathProgram& prog, ProgramFormat format);

MathProgram parse_native_program(const std::string& text);

struct LocalSolveConfig {
  int restarts = 8;
  long outer_rounds = 60;
  long grad_steps = 40;
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

struct LocalSolveResult {
  ValueVec state_values;
  bool verified = false;
  double objective = 0;
  int restarts_used = 0;
};

/// Best-effort internal optimizer: greedy group resolution from the current
/// point, projected gradient descent on the product objective (projection by
/// clipping) and Bellman-consistent repair of the state variables, restarted
/// from the warm-start vector first and random points after. The result is
/// only trusted when verify_solution passes at cfg.tol.
LocalSolveResult local_solve(const MathProgram& prog, const ValueVec* init = nullptr,
                             const LocalSolveConfig& cfg = {});

}  // namespace sgs
