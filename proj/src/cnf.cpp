#include "satfactor/cnf.hpp"

#include <algorithm>
#include <deque>

namespace satfactor::cnf {

Clause::Clause(std::vector<Lit> lits) : lits_(std::move(lits)) {
  if (lits_.empty()) throw InvalidClause("empty clause");
  for (std::size_t i = 0; i < lits_.size(); ++i) {
    if (!lits_[i].var().valid()) throw InvalidClause("literal with variable id 0");
    for (std::size_t j = i + 1; j < lits_.size(); ++j) {
      if (lits_[i].var() != lits_[j].var()) continue;
      if (lits_[i] == lits_[j]) {
        throw InvalidClause("duplicate literal " + std::to_string(lits_[i].to_dimacs()));
      }
      throw InvalidClause("tautological clause on variable " + std::to_string(lits_[i].var().id()));
    }
  }
}

Clause Clause::from_dimacs(std::initializer_list<std::int64_t> values) {
  std::vector<Lit> lits;
  lits.reserve(values.size());
  for (auto v : values) lits.push_back(Lit::from_dimacs(v));
  return Clause(std::move(lits));
}

void Formula::add(Clause c) {
  for (Lit l : c.literals()) {
    if (l.var().id() > num_vars) {
      throw std::invalid_argument("literal " + std::to_string(l.to_dimacs()) + " exceeds num_vars " +
                                  std::to_string(num_vars));
    }
  }
  clauses.push_back(std::move(c));
}

void Assignment::set(Var v, bool value) { set(v, value ? Value::True : Value::False); }

void Assignment::set(Var v, Value value) {
  if (!v.valid()) throw std::invalid_argument("Assignment::set: variable id 0");
  if (v.id() >= values_.size()) values_.resize(v.id() + 1, Value::Unassigned);
  values_[v.id()] = value;
}

Value Assignment::eval(Lit l) const {
  Value v = get(l.var());
  if (v == Value::Unassigned || !l.negated()) return v;
  return v == Value::True ? Value::False : Value::True;
}

bool Assignment::value_of(Var v) const {
  Value value = get(v);
  if (value == Value::Unassigned) throw UnassignedVariable(v);
  return value == Value::True;
}

UnassignedVariable::UnassignedVariable(Var v)
    : std::invalid_argument("variable " + std::to_string(v.id()) + " is unassigned") {}

bool evaluate(const Formula& f, const Assignment& a) {
  bool all_satisfied = true;
  for (const Clause& c : f.clauses) {
    bool satisfied = false;
    for (Lit l : c.literals()) {
      Value v = a.eval(l);
      if (v == Value::Unassigned) throw UnassignedVariable(l.var());
      if (v == Value::True) satisfied = true;
    }
    if (!satisfied) all_satisfied = false;
  }
  return all_satisfied;
}

Simplified unit_propagate(const Formula& f) {
  Simplified result;
  result.fixed = Assignment(f.num_vars);

  // Occurrence lists let each newly fixed variable revisit only the clauses
  // that mention it.
  std::vector<std::vector<std::size_t>> occurs(f.num_vars + 1);
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    for (Lit l : f.clauses[i].literals()) occurs[l.var().id()].push_back(i);
  }

  std::deque<Lit> queue;
  auto fix = [&](Lit l) -> bool {
    Value current = result.fixed.eval(l);
    if (current == Value::True) return true;
    if (current == Value::False) return false;
    result.fixed.set(l.var(), !l.negated());
    queue.push_back(l);
    return true;
  };

  auto scan = [&](const Clause& c) -> bool {
    std::optional<Lit> open;
    std::size_t open_count = 0;
    for (Lit l : c.literals()) {
      Value v = result.fixed.eval(l);
      if (v == Value::True) return true;
      if (v == Value::Unassigned) {
        open = l;
        ++open_count;
      }
    }
    if (open_count == 0) return false;
    if (open_count == 1) return fix(*open);
    return true;
  };

  for (const Clause& c : f.clauses) {
    if (c.size() == 1 && !fix(c.literals()[0])) {
      result.conflict = true;
      break;
    }
  }
  while (!result.conflict && !queue.empty()) {
    Lit l = queue.front();
    queue.pop_front();
    for (std::size_t ci : occurs[l.var().id()]) {
      if (!scan(f.clauses[ci])) {
        result.conflict = true;
        break;
      }
    }
  }

  result.formula.num_vars = f.num_vars;
  result.formula.annotations = f.annotations;
  if (result.conflict) return result;

  for (const Clause& c : f.clauses) {
    std::vector<Lit> kept;
    bool satisfied = false;
    for (Lit l : c.literals()) {
      Value v = result.fixed.eval(l);
      if (v == Value::True) {
        satisfied = true;
        break;
      }
      if (v == Value::Unassigned) kept.push_back(l);
    }
    if (!satisfied) result.formula.clauses.emplace_back(std::move(kept));
  }
  return result;
}

Stats count_stats(const Formula& f) {
  Stats s;
  s.vars = f.num_vars;
  s.clauses = f.clauses.size();
  std::size_t literals = 0;
  for (const Clause& c : f.clauses) literals += c.size();
  s.avg_literals = s.clauses == 0 ? 0.0 : static_cast<double>(literals) / static_cast<double>(s.clauses);
  return s;
}

}  // namespace satfactor::cnf
