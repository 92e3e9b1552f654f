#pragma once

#include <stdexcept>
#include <string>

namespace repgame {

// Payoff comparisons (best-reply membership, equilibrium checks).
inline constexpr double kPayoffTol = 1e-9;
// Probability mass bookkeeping.
inline constexpr double kProbTol = 1e-12;

// Malformed input: bad distributions, dimension mismatches, schema errors.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Input is structurally fine but exceeds the desk-scale solver limits.
class SizeError : public std::runtime_error {
 public:
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// A solver reached a state that finite-game theory rules out; indicates a bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace repgame
