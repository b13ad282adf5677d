#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "satfactor/encoder.hpp"
#include "satfactor/solver.hpp"

using namespace satfactor;
using namespace satfactor::encoder;
using cnf::Assignment;
using cnf::Value;

namespace {

// Fixes `inputs` to `values`, propagates, and returns the value of each
// literal in `outputs` (Unassigned when propagation does not decide it).
std::vector<Value> propagate_outputs(const Formula& base, const std::vector<Var>& inputs,
                                     const std::vector<bool>& values, const std::vector<Lit>& outputs) {
  Formula f = base;
  for (std::size_t i = 0; i < inputs.size(); ++i) f.add(Clause{Lit(inputs[i], !values[i])});
  auto s = cnf::unit_propagate(f);
  EXPECT_FALSE(s.conflict);
  std::vector<Value> out;
  for (Lit l : outputs) out.push_back(s.fixed.eval(l));
  return out;
}

Value as_value(bool b) { return b ? Value::True : Value::False; }

std::vector<Var> fresh(CircuitBuilder& b, std::size_t n) {
  std::vector<Var> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(b.fresh_var());
  return v;
}

std::vector<bool> bits_of(std::uint64_t x, std::size_t width) {
  std::vector<bool> out;
  for (std::size_t i = 0; i < width; ++i) out.push_back(((x >> i) & 1) != 0);
  return out;
}

std::uint64_t read(const std::vector<Value>& vals) {
  std::uint64_t x = 0;
  for (std::size_t i = vals.size(); i-- > 0;) {
    EXPECT_NE(vals[i], Value::Unassigned);
    x = (x << 1) | (vals[i] == Value::True ? 1 : 0);
  }
  return x;
}

EncodeSpec spec_for(std::uint64_t n, unsigned mp, unsigned mq, Algorithm alg) {
  EncodeSpec s;
  s.n_bits = bit_length(n);
  s.targets = {n};
  s.algorithm = alg;
  s.m_p = mp;
  s.m_q = mq;
  return s;
}

std::optional<Decoded> solve_and_decode(const Encoded& e, std::uint64_t seed = 0) {
  solver::SolverConfig cfg;
  cfg.seed = seed;
  auto r = solver::solve(e.formula, cfg);
  EXPECT_NE(r.status, cnf::SolveStatus::Unknown);
  if (r.status != cnf::SolveStatus::Sat) return std::nullopt;
  return decode(e.varmap, *r.assignment);
}

// All (p, q) bit patterns the circuit admits, via blocking clauses on the factor bits.
std::set<std::pair<std::uint64_t, std::uint64_t>> enumerate_factor_models(const Encoded& e) {
  Formula f = e.formula;
  std::set<std::pair<std::uint64_t, std::uint64_t>> found;
  for (;;) {
    auto r = solver::solve(f);
    EXPECT_NE(r.status, cnf::SolveStatus::Unknown);
    if (r.status != cnf::SolveStatus::Sat) break;
    auto d = decode(e.varmap, *r.assignment);
    auto key = std::make_pair(static_cast<std::uint64_t>(d.p), static_cast<std::uint64_t>(d.q));
    EXPECT_TRUE(found.insert(key).second) << "model repeated";
    std::vector<Lit> block;
    for (Var v : e.varmap.p_bits) block.emplace_back(v, r.assignment->value_of(v));
    for (Var v : e.varmap.q_bits) block.emplace_back(v, r.assignment->value_of(v));
    f.add(Clause(block));
    if (found.size() > 64) break;
  }
  return found;
}

std::set<std::pair<std::uint64_t, std::uint64_t>> oracle_pairs(std::uint64_t n, unsigned mp, unsigned mq) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t p = 1ull << (mp - 1); p < (1ull << mp); ++p) {
    if (n % p) continue;
    std::uint64_t q = n / p;
    if (q >= (1ull << (mq - 1)) && q < (1ull << mq)) out.emplace(p, q);
  }
  return out;
}

}  // namespace

TEST(Gates, AndGate) {
  CircuitBuilder b;
  auto in = fresh(b, 2);
  Var w = b.and_gate(in[0], in[1]);
  EXPECT_EQ(b.num_clauses(), 3u);
  EXPECT_EQ(b.num_vars(), 3u);
  Formula f = std::move(b).finish();
  for (int m = 0; m < 4; ++m) {
    bool x = m & 1, y = m & 2;
    auto out = propagate_outputs(f, in, {x, y}, {w});
    EXPECT_EQ(out[0], as_value(x && y));
  }
}

TEST(Gates, AndGateSatisfyingAssignmentsMatchTruthTable) {
  CircuitBuilder b;
  auto in = fresh(b, 2);
  Var w = b.and_gate(in[0], in[1]);
  Formula f = std::move(b).finish();
  for (int m = 0; m < 8; ++m) {
    Assignment a(3);
    a.set(in[0], (m & 1) != 0);
    a.set(in[1], (m & 2) != 0);
    a.set(w, (m & 4) != 0);
    EXPECT_EQ(cnf::evaluate(f, a), ((m & 4) != 0) == ((m & 1) && (m & 2)));
  }
}

TEST(Gates, HalfAdder) {
  CircuitBuilder b;
  auto in = fresh(b, 2);
  auto [s, c] = b.half_adder(in[0], in[1]);
  EXPECT_EQ(b.num_clauses(), 7u);
  EXPECT_EQ(b.num_vars(), 4u);
  Formula f = std::move(b).finish();
  for (int m = 0; m < 4; ++m) {
    int sum = (m & 1) + ((m >> 1) & 1);
    auto out = propagate_outputs(f, in, bits_of(m, 2), {s, c});
    EXPECT_EQ(out[0], as_value(sum & 1));
    EXPECT_EQ(out[1], as_value(sum >> 1));
  }
}

TEST(Gates, FullAdder) {
  CircuitBuilder b;
  auto in = fresh(b, 3);
  auto [s, c] = b.full_adder(in[0], in[1], in[2]);
  EXPECT_EQ(b.num_clauses(), 14u);
  EXPECT_EQ(b.num_vars(), 5u);
  Formula f = std::move(b).finish();
  std::size_t four = 0;
  std::size_t three = 0;
  for (const auto& cl : f.clauses) (cl.size() == 4 ? four : three) += 1;
  EXPECT_EQ(four, 8u);
  EXPECT_EQ(three, 6u);
  for (int m = 0; m < 8; ++m) {
    int sum = (m & 1) + ((m >> 1) & 1) + ((m >> 2) & 1);
    auto out = propagate_outputs(f, in, bits_of(m, 3), {s, c});
    EXPECT_EQ(out[0], as_value(sum & 1)) << m;
    EXPECT_EQ(out[1], as_value(sum >> 1)) << m;
  }
}

TEST(Gates, FullAdderExamples) {
  CircuitBuilder b;
  auto in = fresh(b, 3);
  auto [s, c] = b.full_adder(in[0], in[1], in[2]);
  Formula f = std::move(b).finish();
  auto out = propagate_outputs(f, in, {true, true, false}, {s, c});
  EXPECT_EQ(out[0], Value::False);
  EXPECT_EQ(out[1], Value::True);
  out = propagate_outputs(f, in, {false, false, false}, {s, c});
  EXPECT_EQ(out[0], Value::False);
  EXPECT_EQ(out[1], Value::False);
}

TEST(Gates, Mux) {
  CircuitBuilder b;
  auto in = fresh(b, 3);
  Var o = b.mux(in[0], in[1], in[2]);
  Formula f = std::move(b).finish();
  for (int m = 0; m < 8; ++m) {
    bool sel = m & 1, t = m & 2, e = m & 4;
    auto out = propagate_outputs(f, in, {sel, t, e}, {o});
    EXPECT_EQ(out[0], as_value(sel ? t : e));
  }
}

TEST(Gates, NegatedInputs) {
  CircuitBuilder b;
  auto in = fresh(b, 2);
  Var w = b.and_gate(~Lit(in[0]), in[1]);
  Formula f = std::move(b).finish();
  for (int m = 0; m < 4; ++m) {
    bool x = m & 1, y = m & 2;
    EXPECT_EQ(propagate_outputs(f, in, {x, y}, {w})[0], as_value(!x && y));
  }
}

TEST(CircuitBuilder, FreshVarsIncrease) {
  CircuitBuilder b;
  Var a = b.fresh_var();
  Var c = b.fresh_var();
  EXPECT_LT(a, c);
  EXPECT_EQ(a.id(), 1u);
  Lit t = b.constant_true();
  EXPECT_TRUE(b.is_constant(t));
  EXPECT_EQ(b.constant_true(), t);
  b.add_clause({a, ~Lit(a)});
  b.add_clause({a, a, c});
  Formula f = std::move(b).finish();
  ASSERT_EQ(f.clauses.size(), 2u);  // unit for TRUE and the deduplicated clause
  EXPECT_EQ(f.clauses[1], Clause({Lit(a), Lit(c)}));
  for (const auto& cl : f.clauses) {
    for (Lit l : cl.literals()) EXPECT_LE(l.var().id(), f.num_vars);
  }
}

TEST(CircuitBuilder, CompressColumnsAddsRandomColumns) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    CircuitBuilder b;
    std::size_t width = 2 + rng() % 6;
    std::vector<std::vector<Lit>> columns(width);
    std::vector<Var> inputs;
    std::vector<std::size_t> weight;
    for (std::size_t c = 0; c < width; ++c) {
      std::size_t k = rng() % 6;
      for (std::size_t i = 0; i < k; ++i) {
        Var v = b.fresh_var();
        inputs.push_back(v);
        weight.push_back(c);
        columns[c].push_back(rng() % 4 == 0 ? ~Lit(v) : Lit(v));
      }
      if (rng() % 3 == 0) columns[c].push_back(b.constant_true());
      if (rng() % 5 == 0) columns[c].push_back(~b.constant_true());
    }
    auto cols_copy = columns;
    auto out = b.compress_columns(columns, width);
    ASSERT_EQ(out.size(), width);
    Formula f = std::move(b).finish();
    for (int sample = 0; sample < 8; ++sample) {
      std::vector<bool> vals;
      for (std::size_t i = 0; i < inputs.size(); ++i) vals.push_back((rng() & 1) != 0);
      std::map<std::uint32_t, bool> value_of;
      for (std::size_t i = 0; i < inputs.size(); ++i) value_of[inputs[i].id()] = vals[i];
      std::uint64_t expected = 0;
      for (std::size_t c = 0; c < width; ++c) {
        for (Lit l : cols_copy[c]) {
          bool v = value_of.count(l.var().id()) ? value_of[l.var().id()] : true;  // else the TRUE constant
          if (v != l.negated()) expected += 1ull << c;
        }
      }
      expected &= (1ull << width) - 1;
      EXPECT_EQ(read(propagate_outputs(f, inputs, vals, out)), expected);
    }
  }
}

TEST(CircuitBuilder, MultipliersComputeProducts) {
  std::mt19937_64 rng(9);
  for (std::size_t wx = 1; wx <= 9; ++wx) {
    for (std::size_t wy = 1; wy <= 9; ++wy) {
      for (bool karatsuba : {false, true}) {
        CircuitBuilder b;
        auto x = fresh(b, wx);
        auto y = fresh(b, wy);
        std::vector<Lit> xl(x.begin(), x.end()), yl(y.begin(), y.end());
        auto prod = karatsuba ? b.multiply_karatsuba(xl, yl) : b.multiply_schoolbook(xl, yl);
        ASSERT_EQ(prod.size(), wx + wy);
        Formula f = std::move(b).finish();
        std::vector<Var> inputs = x;
        inputs.insert(inputs.end(), y.begin(), y.end());
        for (int sample = 0; sample < 6; ++sample) {
          std::uint64_t a = rng() & ((1ull << wx) - 1);
          std::uint64_t c = rng() & ((1ull << wy) - 1);
          auto vals = bits_of(a, wx);
          auto vy = bits_of(c, wy);
          vals.insert(vals.end(), vy.begin(), vy.end());
          EXPECT_EQ(read(propagate_outputs(f, inputs, vals, prod)), a * c)
              << wx << "x" << wy << (karatsuba ? " karatsuba" : " schoolbook");
        }
      }
    }
  }
}

TEST(CircuitBuilder, KaratsubaWideOperands) {
  std::mt19937_64 rng(21);
  for (std::size_t w : {12u, 17u, 24u, 31u}) {
    CircuitBuilder b;
    auto x = fresh(b, w);
    auto y = fresh(b, w);
    auto prod = b.multiply_karatsuba({x.begin(), x.end()}, {y.begin(), y.end()});
    Formula f = std::move(b).finish();
    std::vector<Var> inputs = x;
    inputs.insert(inputs.end(), y.begin(), y.end());
    for (int sample = 0; sample < 5; ++sample) {
      std::uint64_t a = rng() & ((1ull << w) - 1);
      std::uint64_t c = rng() & ((1ull << w) - 1);
      auto vals = bits_of(a, w);
      auto vy = bits_of(c, w);
      vals.insert(vals.end(), vy.begin(), vy.end());
      EXPECT_EQ(read(propagate_outputs(f, inputs, vals, prod)), a * c) << w;
    }
  }
}

TEST(EncodeSpec, Validation) {
  EXPECT_NO_THROW(spec_for(35, 3, 3, Algorithm::Schoolbook).validate());
  EXPECT_THROW(spec_for(35, 2, 2, Algorithm::Schoolbook).validate(), EncodeError);
  EXPECT_THROW(spec_for(35, 2, 4, Algorithm::Schoolbook).validate(), EncodeError);
  EXPECT_THROW(spec_for(35, 1, 5, Algorithm::Schoolbook).validate(), EncodeError);
  auto s = spec_for(35, 3, 3, Algorithm::Schoolbook);
  s.targets.push_back(15);
  EXPECT_THROW(s.validate(), EncodeError);
  s.targets.clear();
  EXPECT_THROW(s.validate(), EncodeError);
  EXPECT_THROW(encode_schoolbook(spec_for(35, 2, 2, Algorithm::Schoolbook)), EncodeError);
  EXPECT_THROW(parse_algorithm("toom"), EncodeError);
  for (auto a : {Algorithm::Schoolbook, Algorithm::Karatsuba, Algorithm::Division}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
}

TEST(EncodeSpec, ForTargetUsesValidSplit) {
  for (std::uint64_t n : {15ull, 35ull, 143ull, 1000003ull * 3ull}) {
    auto s = EncodeSpec::for_target(n);
    EXPECT_NO_THROW(s.validate()) << n;
  }
}

TEST(Schoolbook, ThirtyFive) {
  auto e = encode_schoolbook(spec_for(35, 3, 3, Algorithm::Schoolbook));
  auto d = solve_and_decode(e);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->p * d->q, 35);
  EXPECT_EQ(std::set<Natural>({d->p, d->q}), std::set<Natural>({5, 7}));
  EXPECT_EQ(oracle_pairs(35, 3, 3), (std::set<std::pair<std::uint64_t, std::uint64_t>>{{5, 7}, {7, 5}}));
}

TEST(Schoolbook, PrimeIsUnsat) {
  EXPECT_FALSE(solve_and_decode(encode_schoolbook(spec_for(13, 2, 2, Algorithm::Schoolbook))));
  EXPECT_FALSE(solve_and_decode(encode_schoolbook(spec_for(13, 2, 3, Algorithm::Schoolbook))));
}

TEST(Schoolbook, VarMapContract) {
  auto e = encode_schoolbook(spec_for(143, 4, 4, Algorithm::Schoolbook));
  EXPECT_EQ(e.varmap.p_bits.size(), 4u);
  EXPECT_EQ(e.varmap.q_bits.size(), 4u);
  EXPECT_EQ(e.varmap.out_bits.size(), 8u);
  EXPECT_TRUE(e.varmap.sel_vars.empty());
  std::set<Var> all;
  for (auto* list : {&e.varmap.p_bits, &e.varmap.q_bits, &e.varmap.out_bits}) {
    for (Var v : *list) EXPECT_TRUE(all.insert(v).second);
  }
  auto has_unit = [&](Lit l) {
    for (const auto& c : e.formula.clauses) {
      if (c.size() == 1 && c.literals()[0] == l) return true;
    }
    return false;
  };
  EXPECT_TRUE(has_unit(Lit(e.varmap.p_bits.back())));
  EXPECT_TRUE(has_unit(Lit(e.varmap.q_bits.back())));
  ASSERT_TRUE(e.formula.annotations);
  EXPECT_EQ(e.formula.annotations->varmap, e.varmap);
  EXPECT_EQ(e.formula.annotations->targets, std::vector<Natural>{143});
}

TEST(Karatsuba, ThirtyFive) {
  auto e = encode_karatsuba(spec_for(35, 3, 3, Algorithm::Karatsuba));
  auto d = solve_and_decode(e);
  ASSERT_TRUE(d);
  EXPECT_EQ(std::set<Natural>({d->p, d->q}), std::set<Natural>({5, 7}));
}

TEST(Division, ThirtyFive) {
  auto e = encode_division(spec_for(35, 3, 3, Algorithm::Division));
  auto d = solve_and_decode(e);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->p * d->q, 35);
  EXPECT_TRUE((d->p == 5 && d->q == 7) || (d->p == 7 && d->q == 5));
}

TEST(Division, PrimeIsUnsat) {
  EXPECT_FALSE(solve_and_decode(encode_division(spec_for(13, 2, 2, Algorithm::Division))));
}

TEST(Division, LargerThanSchoolbook) {
  for (std::uint64_t n : {35ull, 143ull, 3127ull, 1022117ull}) {
    auto s = EncodeSpec::for_target(n);
    auto sb = count_stats(encode_schoolbook(s).formula);
    s.algorithm = Algorithm::Division;
    auto dv = count_stats(encode_division(s).formula);
    EXPECT_GT(dv.vars, sb.vars) << n;
    EXPECT_GT(dv.clauses, sb.clauses) << n;
  }
}

TEST(AllEncoders, ModelCountMatchesBruteForce) {
  // Every N below 2^10 and every balanced split: the set of (p, q) models is
  // exactly the set of factor pairs with the requested bit lengths.
  for (std::uint64_t n = 8; n < 1024; ++n) {
    unsigned bits = bit_length(n);
    for (unsigned total = bits; total <= bits + 1; ++total) {
      unsigned mp = total / 2;
      unsigned mq = total - mp;
      if (mp < 2) continue;
      auto expected = oracle_pairs(n, mp, mq);
      for (auto alg : {Algorithm::Schoolbook, Algorithm::Karatsuba, Algorithm::Division}) {
        auto e = encode(spec_for(n, mp, mq, alg));
        ASSERT_EQ(enumerate_factor_models(e), expected) << "N=" << n << " split " << mp << "," << mq << " "
                                                        << to_string(alg);
      }
    }
  }
}

TEST(AllEncoders, EquisatisfiableOnRandomSemiprimes) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 50; ++i) {
    unsigned n = 8 + static_cast<unsigned>(rng() % 9);
    auto sp = numtheory::gen_semiprime(n, rng());
    EncodeSpec s;
    s.n_bits = n;
    s.targets = {sp.value};
    s.m_p = bit_length(sp.p);
    s.m_q = bit_length(sp.q);
    for (auto alg : {Algorithm::Schoolbook, Algorithm::Karatsuba, Algorithm::Division}) {
      s.algorithm = alg;
      auto d = solve_and_decode(encode(s), static_cast<std::uint64_t>(i));
      ASSERT_TRUE(d) << sp.value << " " << to_string(alg);
      EXPECT_EQ(d->p * d->q, sp.value);
      EXPECT_EQ(bit_length(d->p), s.m_p);
      EXPECT_EQ(bit_length(d->q), s.m_q);
    }
  }
}

TEST(MultiTarget, SingleTargetEquisatisfiable) {
  auto s = spec_for(35, 3, 3, Algorithm::Schoolbook);
  auto e = encode_multi_target(s);
  ASSERT_EQ(e.varmap.sel_vars.size(), 1u);
  auto d = solve_and_decode(e);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->matched_target, 0u);
  EXPECT_EQ(d->p * d->q, 35);
}

TEST(MultiTarget, TwoTargets) {
  auto s = spec_for(35, 3, 4, Algorithm::Schoolbook);
  s.targets = {35, 55};  // 5*7 and 5*11, both 6 bits
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto e = encode_multi_target(s);
    auto d = solve_and_decode(e, seed);
    ASSERT_TRUE(d);
    ASSERT_LT(d->matched_target, 2u);
    EXPECT_EQ(d->p * d->q, s.targets[d->matched_target]);
  }
}

TEST(MultiTarget, ThirtyFiveAndSeventySeven) {
  auto s = spec_for(77, 3, 4, Algorithm::Schoolbook);
  s.targets = {77, 91};  // both 7 bits: 7*11 and 7*13
  auto e = encode_multi_target(s);
  auto d = solve_and_decode(e);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->p * d->q, s.targets.at(d->matched_target));
}

TEST(MultiTarget, KaratsubaVariant) {
  auto s = spec_for(77, 3, 4, Algorithm::Karatsuba);
  s.targets = {77, 91, 119};
  auto d = solve_and_decode(encode_multi_target(s), 3);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->p * d->q, s.targets.at(d->matched_target));
}

TEST(MultiTarget, PrimeIsUnsatAndErrors) {
  EXPECT_FALSE(solve_and_decode(encode_multi_target(spec_for(13, 2, 2, Algorithm::Schoolbook))));
  auto dup = spec_for(35, 3, 3, Algorithm::Schoolbook);
  dup.targets = {35, 35};
  EXPECT_THROW(encode_multi_target(dup), EncodeError);
  auto div = spec_for(35, 3, 3, Algorithm::Division);
  div.targets = {35, 33};
  EXPECT_THROW(encode_multi_target(div), EncodeError);
}

TEST(MultiTarget, AllPrimeTargetsUnsat) {
  auto s = spec_for(97, 3, 4, Algorithm::Schoolbook);
  s.targets = {97, 101, 103, 107};
  EXPECT_FALSE(solve_and_decode(encode_multi_target(s)));
}

TEST(Decode, HandBuiltAssignment) {
  VarMap vm;
  vm.p_bits = {Var(1), Var(2), Var(3)};
  vm.q_bits = {Var(4), Var(5), Var(6)};
  Assignment a(6);
  a.set(Var(1), true);
  a.set(Var(2), false);
  a.set(Var(3), true);
  for (std::uint32_t v = 4; v <= 6; ++v) a.set(Var(v), true);
  auto d = decode(vm, a);
  EXPECT_EQ(d.p, 5);
  EXPECT_EQ(d.q, 7);
  EXPECT_EQ(d.matched_target, 0u);
}

TEST(Decode, Selectors) {
  VarMap vm;
  vm.p_bits = {Var(1)};
  vm.q_bits = {Var(2)};
  vm.sel_vars = {Var(3), Var(4), Var(5)};
  Assignment a(5);
  a.set(Var(1), true);
  a.set(Var(2), true);
  a.set(Var(3), false);
  a.set(Var(4), false);
  a.set(Var(5), true);
  EXPECT_EQ(decode(vm, a).matched_target, 2u);
  a.set(Var(5), false);
  EXPECT_THROW(decode(vm, a), DecodeError);
  a.set(Var(3), true);
  a.set(Var(4), true);
  EXPECT_THROW(decode(vm, a), DecodeError);
}

TEST(Sizes, SchoolbookWithinFifteenPercentOfFit) {
  for (unsigned n : {32u, 64u, 128u}) {
    auto s = spec_for(0, n / 2, n / 2, Algorithm::Schoolbook);
    s.n_bits = n;
    s.targets = {(Natural(1) << (n - 1)) | 1};
    auto st = count_stats(encode_schoolbook(s).formula);
    double dn = n;
    double vars_fit = 0.750 * dn * dn + 0.496 * dn - 2.05;
    double clauses_fit = 4.25 * dn * dn - 4.01 * dn - 9.87;
    EXPECT_NEAR(st.vars / vars_fit, 1.0, 0.15) << n;
    EXPECT_NEAR(static_cast<double>(st.clauses) / clauses_fit, 1.0, 0.15) << n;
    EXPECT_GE(st.avg_literals, 3.1);
    EXPECT_LE(st.avg_literals, 3.5);
  }
}

TEST(Sizes, SchoolbookDoublingRatio) {
  auto vars = [](unsigned n) {
    auto s = spec_for(0, n / 2, n / 2, Algorithm::Schoolbook);
    s.n_bits = n;
    s.targets = {(Natural(1) << (n - 1)) | 1};
    return static_cast<double>(count_stats(encode_schoolbook(s).formula).vars);
  };
  for (unsigned n : {32u, 64u, 128u, 256u}) EXPECT_NEAR(vars(n) / vars(n / 2), 4.0, 0.3) << n;
}

TEST(Sizes, KaratsubaSubQuadratic) {
  auto vars = [](unsigned n) {
    auto s = spec_for(0, n / 2, n / 2, Algorithm::Karatsuba);
    s.n_bits = n;
    s.targets = {(Natural(1) << (n - 1)) | 1};
    return static_cast<double>(count_stats(encode_karatsuba(s).formula).vars);
  };
  for (unsigned n : {32u, 64u, 128u}) {
    double r = vars(n) / vars(n / 2);
    EXPECT_LT(r, 4.0) << n;
    EXPECT_GT(r, 2.0) << n;
  }
}
