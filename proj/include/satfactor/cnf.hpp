#pragma once

// CNF data model: variables, literals, clauses, formulas and ternary
// assignments, plus evaluation and unit-propagation simplification.

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "satfactor/numtheory.hpp"

namespace satfactor::cnf {

/// 1-based variable id (DIMACS convention).
class Var {
 public:
  constexpr Var() = default;
  constexpr explicit Var(std::uint32_t id) : id_(id) {}
  constexpr std::uint32_t id() const { return id_; }
  constexpr bool valid() const { return id_ >= 1; }
  friend constexpr auto operator<=>(Var, Var) = default;

 private:
  std::uint32_t id_ = 0;
};

class Lit {
 public:
  constexpr Lit() = default;
  // Implicit: a variable used where a literal is expected is its positive literal.
  constexpr Lit(Var v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  constexpr Lit(Var v, bool negated) : v_(v), negated_(negated) {}
  constexpr static Lit pos(Var v) { return Lit(v, false); }
  constexpr static Lit neg(Var v) { return Lit(v, true); }
  static Lit from_dimacs(std::int64_t value) {
    return Lit(Var(static_cast<std::uint32_t>(std::llabs(value))), value < 0);
  }

  constexpr Var var() const { return v_; }
  constexpr bool negated() const { return negated_; }
  constexpr std::int64_t to_dimacs() const {
    return negated_ ? -static_cast<std::int64_t>(v_.id()) : static_cast<std::int64_t>(v_.id());
  }
  constexpr Lit operator~() const { return Lit(v_, !negated_); }
  friend constexpr auto operator<=>(Lit, Lit) = default;

 private:
  Var v_;
  bool negated_ = false;
};

class InvalidClause : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-empty disjunction with no repeated literal and no complementary pair.
class Clause {
 public:
  /// Throws InvalidClause on empty, duplicate-literal or tautological input.
  explicit Clause(std::vector<Lit> lits);
  Clause(std::initializer_list<Lit> lits) : Clause(std::vector<Lit>(lits)) {}
  static Clause from_dimacs(std::initializer_list<std::int64_t> values);

  std::span<const Lit> literals() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  friend bool operator==(const Clause&, const Clause&) = default;

 private:
  std::vector<Lit> lits_;
};

/// Bit positions of a factoring circuit, LSB first, so that models can be
/// read back as integers.
struct VarMap {
  std::vector<Var> p_bits;
  std::vector<Var> q_bits;
  std::vector<Var> out_bits;
  std::vector<Var> sel_vars;  // one per target in multi-target mode

  friend bool operator==(const VarMap&, const VarMap&) = default;
};

struct Annotations {
  VarMap varmap;
  std::vector<Natural> targets;

  bool empty() const {
    return varmap.p_bits.empty() && varmap.q_bits.empty() && varmap.out_bits.empty() &&
           varmap.sel_vars.empty() && targets.empty();
  }
  friend bool operator==(const Annotations&, const Annotations&) = default;
};

struct Formula {
  std::uint32_t num_vars = 0;
  std::vector<Clause> clauses;
  std::optional<Annotations> annotations;

  /// Throws std::invalid_argument when a literal exceeds num_vars.
  void add(Clause c);
  friend bool operator==(const Formula&, const Formula&) = default;
};

enum class Value : std::int8_t { False = 0, True = 1, Unassigned = 2 };

/// Ternary values indexed by variable id 1..num_vars.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::uint32_t num_vars) : values_(num_vars + 1, Value::Unassigned) {}

  std::uint32_t num_vars() const { return values_.empty() ? 0 : static_cast<std::uint32_t>(values_.size() - 1); }
  Value get(Var v) const { return v.id() < values_.size() ? values_[v.id()] : Value::Unassigned; }
  void set(Var v, bool value);
  void set(Var v, Value value);
  void unset(Var v) { set(v, Value::Unassigned); }
  bool is_assigned(Var v) const { return get(v) != Value::Unassigned; }
  /// Value of a literal; Unassigned when its variable is.
  Value eval(Lit l) const;
  bool value_of(Var v) const;  // throws when unassigned

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Value> values_;
};

class UnassignedVariable : public std::invalid_argument {
 public:
  explicit UnassignedVariable(Var v);
};

/// True iff every clause has a satisfied literal. Throws UnassignedVariable
/// if any variable referenced by the formula is unassigned.
bool evaluate(const Formula& f, const Assignment& a);

struct Simplified {
  Formula formula;
  Assignment fixed;  // values forced by propagation
  bool conflict = false;
};

/// Unit propagation to fixpoint. Satisfied clauses are dropped and false
/// literals deleted; variable ids are kept. On conflict the returned
/// formula has no clauses and `conflict` is set.
Simplified unit_propagate(const Formula& f);

struct Stats {
  std::uint32_t vars = 0;
  std::size_t clauses = 0;
  double avg_literals = 0.0;
};

Stats count_stats(const Formula& f);

}  // namespace satfactor::cnf
