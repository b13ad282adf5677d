#include <gtest/gtest.h>

#include <random>

#include "satfactor/cnf.hpp"

using namespace satfactor::cnf;

namespace {

Formula nand_formula() {
  // z = NAND(x, y) with x = 1, y = 2, z = 3.
  Formula f;
  f.num_vars = 3;
  f.add(Clause::from_dimacs({1, 3}));
  f.add(Clause::from_dimacs({2, 3}));
  f.add(Clause::from_dimacs({-1, -2, -3}));
  return f;
}

Assignment make(std::initializer_list<int> values) {
  Assignment a(static_cast<std::uint32_t>(values.size()));
  std::uint32_t v = 1;
  for (int x : values) a.set(Var(v++), x != 0);
  return a;
}

Formula random_formula(std::mt19937_64& rng, std::uint32_t vars, std::size_t clauses, std::size_t max_len) {
  Formula f;
  f.num_vars = vars;
  std::uniform_int_distribution<std::uint32_t> pick(1, vars);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  while (f.clauses.size() < clauses) {
    std::vector<Lit> lits;
    std::size_t k = len(rng);
    for (std::size_t i = 0; i < k; ++i) {
      Var v(pick(rng));
      bool seen = false;
      for (Lit l : lits) seen = seen || l.var() == v;
      if (!seen) lits.emplace_back(v, (rng() & 1) != 0);
    }
    f.add(Clause(lits));
  }
  return f;
}

}  // namespace

TEST(Lit, Basics) {
  Lit a = Lit::pos(Var(4));
  EXPECT_EQ(a.to_dimacs(), 4);
  EXPECT_EQ((~a).to_dimacs(), -4);
  EXPECT_EQ(Lit::from_dimacs(-7), Lit::neg(Var(7)));
  EXPECT_EQ(~~a, a);
  Lit implicit = Var(2);
  EXPECT_FALSE(implicit.negated());
  EXPECT_FALSE(Var().valid());
  EXPECT_TRUE(Var(1).valid());
}

TEST(Clause, RejectsEmptyDuplicateAndTautology) {
  EXPECT_THROW(Clause(std::vector<Lit>{}), InvalidClause);
  EXPECT_THROW(Clause::from_dimacs({1, 1}), InvalidClause);
  EXPECT_THROW(Clause::from_dimacs({1, -1}), InvalidClause);
  EXPECT_THROW(Clause::from_dimacs({0}), InvalidClause);
  EXPECT_EQ(Clause::from_dimacs({1, -2}).size(), 2u);
}

TEST(Formula, AddChecksRange) {
  Formula f;
  f.num_vars = 2;
  EXPECT_NO_THROW(f.add(Clause::from_dimacs({1, -2})));
  EXPECT_THROW(f.add(Clause::from_dimacs({3})), std::invalid_argument);
}

TEST(Evaluate, NandExamples) {
  Formula f = nand_formula();
  EXPECT_TRUE(evaluate(f, make({1, 0, 1})));
  EXPECT_FALSE(evaluate(f, make({1, 1, 1})));
  EXPECT_FALSE(evaluate(f, make({1, 0, 0})));
}

TEST(Evaluate, NandTruthTable) {
  Formula f = nand_formula();
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int z = 0; z < 2; ++z) {
        EXPECT_EQ(evaluate(f, make({x, y, z})), z == !(x && y)) << x << y << z;
      }
    }
  }
}

TEST(Evaluate, EmptyFormulaIsTrue) {
  Formula f;
  EXPECT_TRUE(evaluate(f, Assignment()));
  f.num_vars = 3;
  EXPECT_TRUE(evaluate(f, Assignment(3)));
}

TEST(Evaluate, UnassignedVariableThrows) {
  Formula f = nand_formula();
  Assignment a(3);
  a.set(Var(1), true);
  a.set(Var(2), true);
  EXPECT_THROW(evaluate(f, a), UnassignedVariable);
}

TEST(Assignment, TernaryValues) {
  Assignment a(2);
  EXPECT_EQ(a.get(Var(1)), Value::Unassigned);
  a.set(Var(1), true);
  EXPECT_EQ(a.eval(Lit::neg(Var(1))), Value::False);
  EXPECT_EQ(a.eval(Lit::pos(Var(2))), Value::Unassigned);
  EXPECT_TRUE(a.value_of(Var(1)));
  EXPECT_THROW(a.value_of(Var(2)), std::exception);
  a.unset(Var(1));
  EXPECT_FALSE(a.is_assigned(Var(1)));
  EXPECT_EQ(a.get(Var(99)), Value::Unassigned);
}

TEST(UnitPropagate, ChainFixesEverything) {
  Formula f;
  f.num_vars = 2;
  f.add(Clause::from_dimacs({1}));
  f.add(Clause::from_dimacs({-1, 2}));
  auto s = unit_propagate(f);
  EXPECT_FALSE(s.conflict);
  EXPECT_TRUE(s.formula.clauses.empty());
  EXPECT_EQ(s.fixed.get(Var(1)), Value::True);
  EXPECT_EQ(s.fixed.get(Var(2)), Value::True);
  EXPECT_EQ(s.formula.num_vars, 2u);
}

TEST(UnitPropagate, Conflict) {
  Formula f;
  f.num_vars = 1;
  f.add(Clause::from_dimacs({1}));
  f.add(Clause::from_dimacs({-1}));
  auto s = unit_propagate(f);
  EXPECT_TRUE(s.conflict);
  EXPECT_TRUE(s.formula.clauses.empty());
}

TEST(UnitPropagate, NoUnitsIsFixpoint) {
  Formula f = nand_formula();
  auto s = unit_propagate(f);
  EXPECT_FALSE(s.conflict);
  EXPECT_EQ(s.formula.clauses, f.clauses);
}

TEST(UnitPropagate, ShortensClauses) {
  Formula f;
  f.num_vars = 3;
  f.add(Clause::from_dimacs({-1}));
  f.add(Clause::from_dimacs({1, 2, 3}));
  auto s = unit_propagate(f);
  ASSERT_EQ(s.formula.clauses.size(), 1u);
  EXPECT_EQ(s.formula.clauses[0], Clause::from_dimacs({2, 3}));
}

TEST(UnitPropagate, PreservesEvaluationOnConsistentAssignments) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Formula f = random_formula(rng, 8, 10, 3);
    auto s = unit_propagate(f);
    for (std::uint32_t bits = 0; bits < 256; ++bits) {
      Assignment a(8);
      for (std::uint32_t v = 0; v < 8; ++v) a.set(Var(v + 1), ((bits >> v) & 1) != 0);
      bool consistent = true;
      for (std::uint32_t v = 1; v <= 8; ++v) {
        if (s.fixed.is_assigned(Var(v)) && s.fixed.get(Var(v)) != a.get(Var(v))) consistent = false;
      }
      if (!consistent) {
        // Any assignment contradicting a forced unit falsifies f.
        EXPECT_FALSE(evaluate(f, a));
        continue;
      }
      if (s.conflict) {
        EXPECT_FALSE(evaluate(f, a));
      } else {
        EXPECT_EQ(evaluate(f, a), evaluate(s.formula, a));
      }
    }
  }
}

TEST(CountStats, Examples) {
  auto st = count_stats(nand_formula());
  EXPECT_EQ(st.vars, 3u);
  EXPECT_EQ(st.clauses, 3u);
  EXPECT_DOUBLE_EQ(st.avg_literals, 7.0 / 3.0);
  auto empty = count_stats(Formula{});
  EXPECT_EQ(empty.vars, 0u);
  EXPECT_EQ(empty.clauses, 0u);
  EXPECT_EQ(empty.avg_literals, 0.0);
}
