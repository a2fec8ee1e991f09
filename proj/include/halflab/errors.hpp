#pragma once

#include <stdexcept>
#include <string>

namespace halflab {

// Process exit codes used by the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitInvariant = 4;

// Malformed textual input: schema grammar, rational literals, config files.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold for the inputs.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A lazy generator or scan ran out of its evaluation budget; the caller
// must raise the budget (or shrink the horizon) and retry.
class budget_exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant failed after construction; indicates a defect,
// never a bad input.
class invariant_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace halflab
