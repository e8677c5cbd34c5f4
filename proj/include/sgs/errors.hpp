#pragma once

#include <stdexcept>
#include <string>

namespace sgs {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Game file syntax or structure error; carries a 1-based line (0 = unknown).
struct ParseError : Error {
  ParseError(int line_, int column_, const std::string& msg)
      : Error(format(line_, column_, msg)), line(line_), column(column_) {}
  int line;
  int column;
  static std::string format(int line, int column, const std::string& msg) {
    std::string out;
    if (line > 0) {
      out += "line " + std::to_string(line);
      if (column > 0) out += ":" + std::to_string(column);
      out += ": ";
    }
    return out + msg;
  }
};

/// Violation of a game invariant (distribution sums, action references, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// A solver-side failure: singular system, properness violation, budget.
struct SolverError : Error {
  using Error::Error;
};

/// Maximizer strategy does not reach the target/sink region almost surely.
struct PropernessError : SolverError {
  using SolverError::SolverError;
};

/// A mathematical-program encoding cannot be produced (strategy-pair budget).
struct EncodingInfeasibleError : Error {
  EncodingInfeasibleError(const std::string& msg, double pair_count_)
      : Error(msg), pair_count(pair_count_) {}
  double pair_count;
};

/// Precondition of an operation does not hold (e.g. 2Act violated).
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace sgs
