#pragma once

// Embedded CDCL solver and an adapter for external DIMACS solvers.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "satfactor/cnf.hpp"
#include "satfactor/dimacs.hpp"

namespace satfactor::solver {

using cnf::SolveStatus;

struct SolverConfig {
  std::uint64_t seed = 0;
  double var_decay = 0.95;
  std::uint32_t restart_base = 64;
  double random_polarity_prob = 0.02;
  std::optional<std::uint64_t> conflict_limit;
  std::optional<double> time_limit;  // seconds

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<cnf::Assignment> assignment;  // present iff status == Sat
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  double wall_time = 0.0;
};

/// Conflict-driven clause learning: two watched literals, first-UIP
/// learning with recursive minimization, VSIDS branching with phase saving,
/// Luby restarts, LBD-based learnt clause deletion. Deterministic for a
/// fixed (formula, config) unless a time limit fires. Every SAT model is
/// checked against the formula before returning.
SolveResult solve(const cnf::Formula& f, const SolverConfig& cfg = {});

enum class ExternalErrorKind { Spawn, Unparseable, Io };

class ExternalSolverError : public std::runtime_error {
 public:
  ExternalSolverError(ExternalErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ExternalErrorKind kind() const { return kind_; }

 private:
  ExternalErrorKind kind_;
};

/// Runs `<cmd> <dimacs-path>` through /bin/sh (a `{}` in the template is
/// replaced by the path instead of appending it), parsing SAT-competition
/// output. The exit code is ignored in favour of the `s` line. On timeout
/// the child's process group is killed and the result is Unknown.
SolveResult solve_external(const std::string& cmd_template, const cnf::Formula& f, double time_limit);

}  // namespace satfactor::solver
