#pragma once

#include <iosfwd>
#include <string>

#include "sgs/game.hpp"

namespace sgs {

/// Parses the `.ssg` text format.
///
/// Line-oriented; '#' starts a comment. Fields:
///   states N
///   initial I
///   targets T1 T2 ...
///   owner S max|min            (one line per state)
///   action S NAME (T:P)(T:P).. (order of lines defines the action index)
/// Probabilities are decimals or fractions n/d; distributions must sum to 1
/// within 1e-12 and are stored exactly (renormalized when not exactly 1).
/// Declared target actions are replaced by a single probability-1 self-loop.
StochasticGame parse_game(const std::string& text);

StochasticGame load_game(const std::string& path);

/// Canonical serialization: fields in declaration order, states ascending.
/// parse_game(serialize_game(g)) reproduces g, and serialization is a
/// fixpoint of parse+serialize.
std::string serialize_game(const StochasticGame& game);

void save_game(const StochasticGame& game, const std::string& path);

}  // namespace sgs
