#include "satfactor/encoder.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace satfactor::encoder {

Var CircuitBuilder::fresh_var() { return Var(next_var_++); }

void CircuitBuilder::add_clause(std::vector<Lit> lits) {
  std::vector<Lit> unique;
  unique.reserve(lits.size());
  for (Lit l : lits) {
    if (std::find(unique.begin(), unique.end(), ~l) != unique.end()) return;  // tautology
    if (std::find(unique.begin(), unique.end(), l) == unique.end()) unique.push_back(l);
  }
  clauses_.emplace_back(std::move(unique));
}

Lit CircuitBuilder::constant_true() {
  if (!true_var_) {
    true_var_ = fresh_var();
    fix(*true_var_);
  }
  return *true_var_;
}

Var CircuitBuilder::and_gate(Lit a, Lit b) {
  Var w = fresh_var();
  add_clause({~a, ~b, w});
  add_clause({a, ~Lit(w)});
  add_clause({b, ~Lit(w)});
  return w;
}

std::pair<Var, Var> CircuitBuilder::half_adder(Lit a, Lit b) {
  Var s = fresh_var();
  Var c = fresh_var();
  // s <-> a xor b
  add_clause({~a, ~b, ~Lit(s)});
  add_clause({a, b, ~Lit(s)});
  add_clause({~a, b, s});
  add_clause({a, ~b, s});
  // c <-> a and b
  add_clause({~a, ~b, c});
  add_clause({a, ~Lit(c)});
  add_clause({b, ~Lit(c)});
  return {s, c};
}

std::pair<Var, Var> CircuitBuilder::full_adder(Lit a, Lit b, Lit c) {
  Var s = fresh_var();
  Var co = fresh_var();
  // One clause per input pattern: the sum literal must match its parity.
  for (int mask = 0; mask < 8; ++mask) {
    bool va = mask & 1;
    bool vb = mask & 2;
    bool vc = mask & 4;
    bool parity = va ^ vb ^ vc;
    add_clause({va ? ~a : a, vb ? ~b : b, vc ? ~c : c, parity ? Lit(s) : ~Lit(s)});
  }
  // co <-> majority(a, b, c)
  add_clause({~a, ~b, co});
  add_clause({~a, ~c, co});
  add_clause({~b, ~c, co});
  add_clause({a, b, ~Lit(co)});
  add_clause({a, c, ~Lit(co)});
  add_clause({b, c, ~Lit(co)});
  return {s, co};
}

Var CircuitBuilder::mux(Lit sel, Lit if_true, Lit if_false) {
  Var o = fresh_var();
  add_clause({~sel, ~if_true, o});
  add_clause({~sel, if_true, ~Lit(o)});
  add_clause({sel, ~if_false, o});
  add_clause({sel, if_false, ~Lit(o)});
  // Equal data inputs fix the output directly.
  add_clause({~if_true, ~if_false, o});
  add_clause({if_true, if_false, ~Lit(o)});
  return o;
}

Var CircuitBuilder::to_var(Lit l) {
  if (!l.negated() && !is_constant(l)) return l.var();
  Var v = fresh_var();
  add_clause({~l, v});
  add_clause({l, ~Lit(v)});
  return v;
}

Lit CircuitBuilder::and_lit(Lit a, Lit b) {
  if (is_constant(a)) return a.negated() ? a : b;
  if (is_constant(b)) return b.negated() ? b : a;
  if (a == b) return a;
  if (a == ~b) return ~constant_true();
  return and_gate(a, b);
}

std::vector<Lit> CircuitBuilder::compress_columns(std::vector<std::vector<Lit>> columns, std::size_t width) {
  columns.resize(std::max(columns.size(), width));

  // Fold constant bits into a single number and re-spread it, so a column
  // never holds more than one constant.
  std::vector<std::deque<Lit>> work(width);
  std::size_t constant_carry = 0;
  for (std::size_t c = 0; c < width; ++c) {
    std::size_t ones = constant_carry;
    for (Lit l : columns[c]) {
      if (is_constant(l)) {
        if (!l.negated()) ++ones;
      } else {
        work[c].push_back(l);
      }
    }
    if (ones & 1) work[c].push_back(constant_true());
    constant_carry = ones >> 1;
  }

  std::vector<Lit> out(width);
  for (std::size_t c = 0; c < width; ++c) {
    auto& col = work[c];
    auto push_carry = [&](Var carry) {
      if (c + 1 < width) work[c + 1].push_back(carry);
    };
    while (col.size() >= 3) {
      Lit a = col.front();
      col.pop_front();
      Lit b = col.front();
      col.pop_front();
      Lit d = col.front();
      col.pop_front();
      auto [s, carry] = full_adder(a, b, d);
      col.push_back(s);
      push_carry(carry);
    }
    if (col.size() == 2) {
      auto [s, carry] = half_adder(col[0], col[1]);
      col.clear();
      col.push_back(s);
      push_carry(carry);
    }
    out[c] = col.empty() ? ~constant_true() : col.front();
  }
  return out;
}

std::vector<Lit> CircuitBuilder::add(const std::vector<Lit>& x, const std::vector<Lit>& y) {
  std::size_t width = std::max(x.size(), y.size()) + 1;
  std::vector<std::vector<Lit>> columns(width);
  for (std::size_t i = 0; i < x.size(); ++i) columns[i].push_back(x[i]);
  for (std::size_t i = 0; i < y.size(); ++i) columns[i].push_back(y[i]);
  return compress_columns(std::move(columns), width);
}

std::vector<Lit> CircuitBuilder::multiply_schoolbook(const std::vector<Lit>& x, const std::vector<Lit>& y) {
  std::size_t width = x.size() + y.size();
  std::vector<std::vector<Lit>> columns(width);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) columns[i + j].push_back(and_lit(x[i], y[j]));
  }
  return compress_columns(std::move(columns), width);
}

std::vector<Lit> CircuitBuilder::multiply_karatsuba(const std::vector<Lit>& x, const std::vector<Lit>& y) {
  const std::size_t a = x.size();
  const std::size_t b = y.size();
  const std::size_t h = std::max(a, b) / 2;
  if (std::min(a, b) <= 4 || std::min(a, b) <= h) return multiply_schoolbook(x, y);
  std::vector<Lit> x_lo(x.begin(), x.begin() + h), x_hi(x.begin() + h, x.end());
  std::vector<Lit> y_lo(y.begin(), y.begin() + h), y_hi(y.begin() + h, y.end());

  std::vector<Lit> z0 = multiply_karatsuba(x_lo, y_lo);
  std::vector<Lit> z2 = multiply_karatsuba(x_hi, y_hi);
  std::vector<Lit> z1_full = multiply_karatsuba(add(x_lo, x_hi), add(y_lo, y_hi));

  // z1 = x_lo*y_hi + x_hi*y_lo < 2^(max(a,b)+1); compute it modulo that
  // width as z1_full + ~z0 + ~z2 + 2 (two two's-complement negations).
  const std::size_t w = std::max(a, b) + 1;
  const Lit one = constant_true();
  std::vector<std::vector<Lit>> mid(w);
  for (std::size_t c = 0; c < w; ++c) {
    if (c < z1_full.size()) mid[c].push_back(z1_full[c]);
    mid[c].push_back(c < z0.size() ? ~z0[c] : one);
    mid[c].push_back(c < z2.size() ? ~z2[c] : one);
  }
  mid[1].push_back(one);
  std::vector<Lit> z1 = compress_columns(std::move(mid), w);

  const std::size_t width = a + b;
  std::vector<std::vector<Lit>> columns(width);
  for (std::size_t c = 0; c < z0.size() && c < width; ++c) columns[c].push_back(z0[c]);
  for (std::size_t c = 0; c < z1.size() && c + h < width; ++c) columns[c + h].push_back(z1[c]);
  for (std::size_t c = 0; c < z2.size() && c + 2 * h < width; ++c) columns[c + 2 * h].push_back(z2[c]);
  return compress_columns(std::move(columns), width);
}

Formula CircuitBuilder::finish() && {
  Formula f;
  f.num_vars = num_vars();
  f.clauses = std::move(clauses_);
  return f;
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Schoolbook: return "schoolbook";
    case Algorithm::Karatsuba: return "karatsuba";
    case Algorithm::Division: return "division";
  }
  return "schoolbook";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "schoolbook") return Algorithm::Schoolbook;
  if (name == "karatsuba") return Algorithm::Karatsuba;
  if (name == "division") return Algorithm::Division;
  throw EncodeError("unknown encoder '" + name + "' (expected schoolbook, karatsuba or division)");
}

EncodeSpec EncodeSpec::for_target(const Natural& n, Algorithm algorithm) {
  EncodeSpec spec;
  spec.n_bits = bit_length(n);
  spec.targets = {n};
  spec.algorithm = algorithm;
  auto split = numtheory::factor_splits(std::max(spec.n_bits, 4u)).front();
  spec.m_p = split.first;
  spec.m_q = split.second;
  return spec;
}

void EncodeSpec::validate() const {
  if (targets.empty()) throw EncodeError("no target given");
  if (m_p < 2 || m_q < 2) throw EncodeError("factor widths must be at least 2 bits");
  if (m_p + m_q != n_bits && m_p + m_q != n_bits + 1) {
    throw EncodeError("factor split (" + std::to_string(m_p) + ", " + std::to_string(m_q) +
                      ") incompatible with " + std::to_string(n_bits) + "-bit target");
  }
  if ((m_p > m_q ? m_p - m_q : m_q - m_p) > 1) {
    throw EncodeError("factor widths may differ by at most one bit");
  }
  for (const Natural& t : targets) {
    if (bit_length(t) != n_bits) {
      throw EncodeError("target " + to_decimal(t) + " has bit length " + std::to_string(bit_length(t)) +
                        ", expected " + std::to_string(n_bits));
    }
  }
}

namespace {

struct Factors {
  std::vector<Var> p;
  std::vector<Var> q;
};

Factors allocate_factors(CircuitBuilder& b, const EncodeSpec& spec) {
  Factors f;
  for (unsigned i = 0; i < spec.m_p; ++i) f.p.push_back(b.fresh_var());
  for (unsigned i = 0; i < spec.m_q; ++i) f.q.push_back(b.fresh_var());
  return f;
}

std::vector<Lit> as_lits(const std::vector<Var>& vars) { return {vars.begin(), vars.end()}; }

void fix_leading_bits(CircuitBuilder& b, const VarMap& vm) {
  b.fix(vm.p_bits.back());
  b.fix(vm.q_bits.back());
}

void fix_to_value(CircuitBuilder& b, const std::vector<Var>& bits, const Natural& value) {
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bool bit = test_bit(value, static_cast<unsigned>(i));
    b.fix(Lit(bits[i], !bit));
  }
}

Encoded finish(CircuitBuilder&& b, VarMap vm, const EncodeSpec& spec) {
  Encoded e;
  e.formula = std::move(b).finish();
  e.formula.annotations = cnf::Annotations{vm, spec.targets};
  e.varmap = std::move(vm);
  return e;
}

void require_single(const EncodeSpec& spec) {
  spec.validate();
  if (spec.targets.size() != 1) throw EncodeError("expected exactly one target, got " + std::to_string(spec.targets.size()));
}

Encoded encode_product(const EncodeSpec& spec, bool karatsuba) {
  require_single(spec);
  CircuitBuilder b;
  Factors f = allocate_factors(b, spec);
  auto product = karatsuba ? b.multiply_karatsuba(as_lits(f.p), as_lits(f.q))
                           : b.multiply_schoolbook(as_lits(f.p), as_lits(f.q));
  VarMap vm;
  vm.p_bits = f.p;
  vm.q_bits = f.q;
  for (Lit l : product) vm.out_bits.push_back(b.to_var(l));
  fix_to_value(b, vm.out_bits, spec.targets.front());
  fix_leading_bits(b, vm);
  return finish(std::move(b), std::move(vm), spec);
}

// Bits m_p+1 of r + ~p + 1 at width m_p+2; bit m_p+1 is set iff r >= p.
std::vector<Lit> subtract_with_flag(CircuitBuilder& b, const std::vector<Lit>& r, const std::vector<Var>& p) {
  const std::size_t width = p.size() + 2;
  const Lit one = b.constant_true();
  std::vector<std::vector<Lit>> columns(width);
  for (std::size_t c = 0; c < r.size(); ++c) columns[c].push_back(r[c]);
  for (std::size_t c = 0; c + 1 < width; ++c) columns[c].push_back(c < p.size() ? ~Lit(p[c]) : one);
  columns[0].push_back(one);
  return b.compress_columns(std::move(columns), width);
}

}  // namespace

Encoded encode_schoolbook(const EncodeSpec& spec) { return encode_product(spec, false); }

Encoded encode_karatsuba(const EncodeSpec& spec) { return encode_product(spec, true); }

Encoded encode_division(const EncodeSpec& spec) {
  require_single(spec);
  CircuitBuilder b;
  VarMap vm;
  for (unsigned i = 0; i < spec.m_p; ++i) vm.p_bits.push_back(b.fresh_var());
  const std::size_t dividend_width = spec.m_p + spec.m_q;
  for (std::size_t i = 0; i < dividend_width; ++i) vm.out_bits.push_back(b.fresh_var());

  // The top m_p dividend bits form the initial partial remainder, which
  // must already be below the divisor for the quotient to fit in m_q bits.
  std::vector<Lit> remainder(vm.out_bits.begin() + spec.m_q, vm.out_bits.end());
  {
    auto diff = subtract_with_flag(b, remainder, vm.p_bits);
    b.fix(~diff[spec.m_p + 1]);
  }

  std::vector<Var> quotient(spec.m_q);
  for (std::size_t stage = spec.m_q; stage-- > 0;) {
    std::vector<Lit> shifted;
    shifted.reserve(spec.m_p + 1);
    shifted.push_back(vm.out_bits[stage]);
    shifted.insert(shifted.end(), remainder.begin(), remainder.end());

    auto diff = subtract_with_flag(b, shifted, vm.p_bits);
    Var q_bit = b.to_var(diff[spec.m_p + 1]);
    quotient[stage] = q_bit;

    std::vector<Lit> next(spec.m_p);
    for (std::size_t i = 0; i < spec.m_p; ++i) next[i] = b.mux(q_bit, diff[i], shifted[i]);
    remainder = std::move(next);
  }
  for (Lit r : remainder) b.fix(~r);

  vm.q_bits = std::move(quotient);
  fix_to_value(b, vm.out_bits, spec.targets.front());
  fix_leading_bits(b, vm);
  return finish(std::move(b), std::move(vm), spec);
}

Encoded encode_multi_target(const EncodeSpec& spec) {
  spec.validate();
  if (spec.algorithm == Algorithm::Division) {
    throw EncodeError("multi-target encoding requires a multiplier (schoolbook or karatsuba)");
  }
  std::set<Natural> distinct(spec.targets.begin(), spec.targets.end());
  if (distinct.size() != spec.targets.size()) throw EncodeError("duplicate targets");

  CircuitBuilder b;
  Factors f = allocate_factors(b, spec);
  auto product = spec.algorithm == Algorithm::Karatsuba ? b.multiply_karatsuba(as_lits(f.p), as_lits(f.q))
                                                        : b.multiply_schoolbook(as_lits(f.p), as_lits(f.q));
  VarMap vm;
  vm.p_bits = f.p;
  vm.q_bits = f.q;
  for (Lit l : product) vm.out_bits.push_back(b.to_var(l));

  std::vector<Lit> any_selected;
  for (const Natural& target : spec.targets) {
    Var sel = b.fresh_var();
    vm.sel_vars.push_back(sel);
    std::vector<Lit> mismatch_or_sel;
    for (std::size_t i = 0; i < vm.out_bits.size(); ++i) {
      Lit match(vm.out_bits[i], !test_bit(target, static_cast<unsigned>(i)));
      b.add_clause({~Lit(sel), match});
      mismatch_or_sel.push_back(~match);
    }
    mismatch_or_sel.push_back(sel);
    b.add_clause(std::move(mismatch_or_sel));
    any_selected.push_back(sel);
  }
  b.add_clause(std::move(any_selected));
  fix_leading_bits(b, vm);
  return finish(std::move(b), std::move(vm), spec);
}

Encoded encode(const EncodeSpec& spec) {
  if (spec.targets.size() > 1) return encode_multi_target(spec);
  switch (spec.algorithm) {
    case Algorithm::Schoolbook: return encode_schoolbook(spec);
    case Algorithm::Karatsuba: return encode_karatsuba(spec);
    case Algorithm::Division: return encode_division(spec);
  }
  throw EncodeError("unknown algorithm");
}

namespace {

Natural read_bits(const std::vector<Var>& bits, const cnf::Assignment& a) {
  Natural value = 0;
  for (std::size_t i = bits.size(); i-- > 0;) {
    value <<= 1;
    if (a.value_of(bits[i])) value |= 1;
  }
  return value;
}

}  // namespace

Decoded decode(const VarMap& vm, const cnf::Assignment& a) {
  Decoded d;
  d.p = read_bits(vm.p_bits, a);
  d.q = read_bits(vm.q_bits, a);
  if (vm.sel_vars.empty()) return d;
  std::optional<std::size_t> matched;
  for (std::size_t k = 0; k < vm.sel_vars.size(); ++k) {
    if (!a.value_of(vm.sel_vars[k])) continue;
    if (matched) throw DecodeError("model selects more than one target");
    matched = k;
  }
  if (!matched) throw DecodeError("model selects no target");
  d.matched_target = *matched;
  return d;
}

}  // namespace satfactor::encoder
