#pragma once

// Compiles integer multiplication and division circuits to CNF via the
// Tseitin construction (one variable per wire, a clause block per gate).
//
// Every encoding fixes the leading bits of both factors to 1, which rules
// out the trivial factorizations 1*N and N*1, and exposes the factor and
// output wires through a VarMap so that a model can be read back as
// integers.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "satfactor/cnf.hpp"
#include "satfactor/numtheory.hpp"

namespace satfactor::encoder {

using cnf::Clause;
using cnf::Formula;
using cnf::Lit;
using cnf::Var;
using cnf::VarMap;

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incremental Tseitin builder. Variables are handed out in increasing
/// order; clauses only ever mention allocated variables.
class CircuitBuilder {
 public:
  Var fresh_var();
  std::uint32_t num_vars() const { return next_var_ - 1; }
  std::size_t num_clauses() const { return clauses_.size(); }

  /// Adds a clause after dropping repeated literals; tautologies are skipped.
  void add_clause(std::vector<Lit> lits);
  void fix(Lit l) { add_clause({l}); }

  /// Literal that is TRUE in every model (allocated on first use).
  Lit constant_true();
  bool is_constant(Lit l) const { return true_var_ && l.var() == *true_var_; }

  Var and_gate(Lit a, Lit b);
  std::pair<Var, Var> half_adder(Lit a, Lit b);  // (sum, carry)
  std::pair<Var, Var> full_adder(Lit a, Lit b, Lit c);
  /// sel ? if_true : if_false
  Var mux(Lit sel, Lit if_true, Lit if_false);
  /// Positive literal for `l`, introducing an equivalent variable if needed.
  Var to_var(Lit l);

  /// Sums weighted bit columns (column c has weight 2^c) into `width` output
  /// bits. Columns are processed LSB to MSB; each takes full adders while at
  /// least three bits remain and a half adder when exactly two remain.
  /// Carries out of the top column are dropped.
  std::vector<Lit> compress_columns(std::vector<std::vector<Lit>> columns, std::size_t width);

  std::vector<Lit> add(const std::vector<Lit>& x, const std::vector<Lit>& y);
  std::vector<Lit> multiply_schoolbook(const std::vector<Lit>& x, const std::vector<Lit>& y);
  /// Karatsuba recursion; operands of width <= 4 fall back to schoolbook.
  std::vector<Lit> multiply_karatsuba(const std::vector<Lit>& x, const std::vector<Lit>& y);

  Formula finish() &&;

 private:
  Lit and_lit(Lit a, Lit b);

  std::uint32_t next_var_ = 1;
  std::vector<Clause> clauses_;
  std::optional<Var> true_var_;
};

enum class Algorithm { Schoolbook, Karatsuba, Division };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct EncodeSpec {
  unsigned n_bits = 0;
  std::vector<Natural> targets;
  Algorithm algorithm = Algorithm::Schoolbook;
  unsigned m_p = 0;
  unsigned m_q = 0;

  /// Single-target spec with the default factor split for N's bit length.
  static EncodeSpec for_target(const Natural& n, Algorithm algorithm = Algorithm::Schoolbook);
  /// Throws EncodeError if the split or targets are inconsistent.
  void validate() const;
};

struct Encoded {
  Formula formula;
  VarMap varmap;
};

Encoded encode_schoolbook(const EncodeSpec& spec);
Encoded encode_karatsuba(const EncodeSpec& spec);
Encoded encode_division(const EncodeSpec& spec);
/// One multiplier (schoolbook or Karatsuba per spec.algorithm) compared
/// against every target; selector e_k is true iff the product equals
/// target k, and at least one selector must hold.
Encoded encode_multi_target(const EncodeSpec& spec);
/// Dispatches on algorithm and target count.
Encoded encode(const EncodeSpec& spec);

struct Decoded {
  Natural p;
  Natural q;
  std::size_t matched_target = 0;
};

Decoded decode(const VarMap& vm, const cnf::Assignment& a);

using cnf::count_stats;

}  // namespace satfactor::encoder
