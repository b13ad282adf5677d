#include <gtest/gtest.h>

#include <random>
#include <set>

#include "satfactor/encoder.hpp"
#include "satfactor/solver.hpp"

using namespace satfactor;
using namespace satfactor::cnf;
using solver::SolverConfig;

namespace {

Formula random_3cnf(std::mt19937_64& rng, std::uint32_t vars, double ratio) {
  Formula f;
  f.num_vars = vars;
  auto clauses = static_cast<std::size_t>(ratio * vars);
  while (f.clauses.size() < clauses) {
    std::set<std::uint32_t> picked;
    while (picked.size() < 3) picked.insert(1 + static_cast<std::uint32_t>(rng() % vars));
    std::vector<Lit> lits;
    for (std::uint32_t v : picked) lits.emplace_back(Var(v), (rng() & 1) != 0);
    f.add(Clause(lits));
  }
  return f;
}

// Exhaustive enumeration over all 2^n assignments with bit masks per clause.
bool truth_table_sat(const Formula& f) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;  // (positive mask, negative mask)
  for (const auto& c : f.clauses) {
    std::uint32_t pos = 0, neg = 0;
    for (Lit l : c.literals()) (l.negated() ? neg : pos) |= 1u << (l.var().id() - 1);
    masks.emplace_back(pos, neg);
  }
  for (std::uint32_t a = 0; a < (1u << f.num_vars); ++a) {
    bool ok = true;
    for (auto [pos, neg] : masks) {
      if (!(a & pos) && !(~a & neg)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

Formula pigeonhole(unsigned holes) {
  // holes+1 pigeons; variable (i, j) = pigeon i in hole j.
  Formula f;
  unsigned pigeons = holes + 1;
  f.num_vars = pigeons * holes;
  auto var = [&](unsigned i, unsigned j) { return Var(i * holes + j + 1); };
  for (unsigned i = 0; i < pigeons; ++i) {
    std::vector<Lit> some;
    for (unsigned j = 0; j < holes; ++j) some.push_back(var(i, j));
    f.add(Clause(some));
  }
  for (unsigned j = 0; j < holes; ++j) {
    for (unsigned a = 0; a < pigeons; ++a) {
      for (unsigned b = a + 1; b < pigeons; ++b) f.add(Clause{~Lit(var(a, j)), ~Lit(var(b, j))});
    }
  }
  return f;
}

encoder::Encoded twenty_bit_instance() {
  auto sp = numtheory::gen_semiprime(20, 4242);
  encoder::EncodeSpec s;
  s.n_bits = 20;
  s.targets = {sp.value};
  s.m_p = bit_length(sp.p);
  s.m_q = bit_length(sp.q);
  return encoder::encode(s);
}

}  // namespace

TEST(Solve, UnitClause) {
  Formula f;
  f.num_vars = 1;
  f.add(Clause::from_dimacs({1}));
  auto r = solver::solve(f);
  ASSERT_EQ(r.status, SolveStatus::Sat);
  ASSERT_TRUE(r.assignment);
  EXPECT_EQ(r.assignment->get(Var(1)), Value::True);
}

TEST(Solve, Contradiction) {
  Formula f;
  f.num_vars = 1;
  f.add(Clause::from_dimacs({1}));
  f.add(Clause::from_dimacs({-1}));
  auto r = solver::solve(f);
  EXPECT_EQ(r.status, SolveStatus::Unsat);
  EXPECT_FALSE(r.assignment);
}

TEST(Solve, EmptyFormulaAndUnusedVariables) {
  Formula f;
  auto r = solver::solve(f);
  EXPECT_EQ(r.status, SolveStatus::Sat);
  f.num_vars = 5;
  f.add(Clause::from_dimacs({2, -4}));
  r = solver::solve(f);
  ASSERT_EQ(r.status, SolveStatus::Sat);
  for (std::uint32_t v = 1; v <= 5; ++v) EXPECT_TRUE(r.assignment->is_assigned(Var(v)));
  EXPECT_TRUE(evaluate(f, *r.assignment));
}

TEST(Solve, ThirtyFive) {
  auto e = encoder::encode(encoder::EncodeSpec::for_target(35));
  auto r = solver::solve(e.formula);
  ASSERT_EQ(r.status, SolveStatus::Sat);
  auto d = encoder::decode(e.varmap, *r.assignment);
  EXPECT_EQ(std::set<Natural>({d.p, d.q}), std::set<Natural>({5, 7}));
}

TEST(Solve, PigeonholeUnsat) {
  for (unsigned h = 2; h <= 6; ++h) EXPECT_EQ(solver::solve(pigeonhole(h)).status, SolveStatus::Unsat) << h;
}

TEST(Solve, MatchesTruthTableOnRandom3Cnf) {
  std::mt19937_64 rng(2024);
  int sat = 0;
  int unsat = 0;
  for (int i = 0; i < 200; ++i) {
    std::uint32_t vars = 5 + static_cast<std::uint32_t>(rng() % 16);  // 5..20
    double ratio = 3.0 + static_cast<double>(rng() % 2001) / 1000.0;  // [3, 5]
    Formula f = random_3cnf(rng, vars, ratio);
    SolverConfig cfg;
    cfg.seed = rng();
    auto r = solver::solve(f, cfg);
    bool expected = truth_table_sat(f);
    ASSERT_EQ(r.status, expected ? SolveStatus::Sat : SolveStatus::Unsat) << "formula " << i;
    if (expected) {
      ASSERT_TRUE(evaluate(f, *r.assignment));
      ++sat;
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 20);
  EXPECT_GT(unsat, 20);
}

TEST(Solve, LargerRandomInstancesAreSound) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 30; ++i) {
    Formula f = random_3cnf(rng, 150, 4.0);
    auto r = solver::solve(f, SolverConfig{.seed = static_cast<std::uint64_t>(i)});
    ASSERT_NE(r.status, SolveStatus::Unknown);
    if (r.status == SolveStatus::Sat) EXPECT_TRUE(evaluate(f, *r.assignment));
  }
}

TEST(Solve, Deterministic) {
  auto e = twenty_bit_instance();
  SolverConfig cfg;
  cfg.seed = 17;
  auto a = solver::solve(e.formula, cfg);
  auto b = solver::solve(e.formula, cfg);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.conflicts, b.conflicts);
  EXPECT_EQ(a.decisions, b.decisions);
  EXPECT_EQ(a.propagations, b.propagations);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(Solve, SeedSensitivity) {
  auto e = twenty_bit_instance();
  std::set<std::uint64_t> conflicts;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SolverConfig cfg;
    cfg.seed = seed;
    auto r = solver::solve(e.formula, cfg);
    ASSERT_EQ(r.status, SolveStatus::Sat);
    auto d = encoder::decode(e.varmap, *r.assignment);
    EXPECT_EQ(d.p * d.q, e.formula.annotations->targets.front());
    conflicts.insert(r.conflicts);
  }
  EXPECT_GE(conflicts.size(), 2u);
}

TEST(Solve, ConflictLimitYieldsUnknown) {
  SolverConfig cfg;
  cfg.conflict_limit = 1;
  auto r = solver::solve(pigeonhole(7), cfg);
  EXPECT_EQ(r.status, SolveStatus::Unknown);
  EXPECT_FALSE(r.assignment);
  EXPECT_LE(r.conflicts, 2u);
}

TEST(Solve, ZeroTimeLimitYieldsUnknown) {
  SolverConfig cfg;
  cfg.time_limit = 0.0;
  auto r = solver::solve(pigeonhole(8), cfg);
  EXPECT_EQ(r.status, SolveStatus::Unknown);
  EXPECT_LT(r.wall_time, 0.5);
}

TEST(Solve, TimeLimitIsHonoured) {
  SolverConfig cfg;
  cfg.time_limit = 0.2;
  auto r = solver::solve(pigeonhole(11), cfg);
  EXPECT_EQ(r.status, SolveStatus::Unknown);
  EXPECT_LT(r.wall_time, 2.0);
}

TEST(Solve, ParametersAffectSearchButNotAnswers) {
  auto e = twenty_bit_instance();
  for (double decay : {0.8, 0.95, 0.99}) {
    for (std::uint32_t base : {1u, 64u, 512u}) {
      for (double rp : {0.0, 0.02, 0.5}) {
        SolverConfig cfg;
        cfg.var_decay = decay;
        cfg.restart_base = base;
        cfg.random_polarity_prob = rp;
        auto r = solver::solve(e.formula, cfg);
        ASSERT_EQ(r.status, SolveStatus::Sat);
        EXPECT_TRUE(evaluate(e.formula, *r.assignment));
      }
    }
  }
}

TEST(SolverConfig, Validation) {
  SolverConfig ok;
  EXPECT_NO_THROW(ok.validate());
  SolverConfig bad = ok;
  bad.var_decay = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.var_decay = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.restart_base = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.random_polarity_prob = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.time_limit = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(solver::solve(Formula{}, bad), std::invalid_argument);
}
