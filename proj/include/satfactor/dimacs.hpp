#pragma once

// DIMACS CNF text I/O and SAT-competition solver output parsing.
//
// Factoring instances carry their decoding metadata in comment lines so the
// files stay valid input for any solver:
//
//   c varmap p <bit-index> <var-id>
//   c varmap q <bit-index> <var-id>
//   c varmap out <bit-index> <var-id>
//   c varmap sel <target-index> <var-id>
//   c target <target-index> <decimal-N>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "satfactor/cnf.hpp"

namespace satfactor::cnf {

enum class DimacsErrorKind {
  MissingHeader,
  MalformedHeader,
  BadToken,
  VariableOutOfRange,
  MissingTerminator,
  ClauseCountMismatch,
  InvalidClause,
  BadAnnotation,
};

class DimacsError : public std::runtime_error {
 public:
  DimacsError(DimacsErrorKind kind, std::size_t line, const std::string& what);
  DimacsErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  DimacsErrorKind kind_;
  std::size_t line_;
};

std::string write_dimacs(const Formula& f);
Formula parse_dimacs(std::string_view text);

enum class SolveStatus { Sat, Unsat, Unknown };

const char* to_string(SolveStatus s);
SolveStatus parse_status(std::string_view s);

struct SolverOutput {
  SolveStatus status = SolveStatus::Unknown;
  Assignment assignment;  // only the variables listed in v-lines
  std::string warning;
};

SolverOutput parse_solver_output(std::string_view text);

/// SAT-competition style output: an `s` line plus, for SAT, `v` lines.
std::string format_solver_output(SolveStatus status, const Assignment* model);

}  // namespace satfactor::cnf
