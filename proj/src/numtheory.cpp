#include "satfactor/numtheory.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace satfactor {

namespace mp = boost::multiprecision;

unsigned bit_length(const Natural& x) {
  if (x <= 0) return 0;
  return static_cast<unsigned>(mp::msb(x)) + 1;
}

unsigned popcount(const Natural& x) {
  unsigned count = 0;
  unsigned len = bit_length(x);
  for (unsigned i = 0; i < len; ++i) {
    if (mp::bit_test(x, i)) ++count;
  }
  return count;
}

bool test_bit(const Natural& x, unsigned index) {
  return mp::bit_test(x, index);
}

double log2_real(const Natural& x) {
  unsigned len = bit_length(x);
  if (len == 0) return -HUGE_VAL;
  if (len <= 53) return std::log2(x.convert_to<double>());
  // Keep the top 53 bits so the conversion to double is exact.
  unsigned shift = len - 53;
  Natural top = x >> shift;
  return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

Natural parse_natural(const std::string& decimal) {
  if (decimal.empty()) throw std::invalid_argument("empty integer literal");
  for (char c : decimal) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("not a non-negative decimal integer: '" + decimal + "'");
    }
  }
  return Natural(decimal);
}

std::string to_decimal(const Natural& x) { return x.str(); }

namespace numtheory {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool witness_u64(std::uint64_t n, std::uint64_t a, std::uint64_t d, unsigned r) {
  std::uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned i = 1; i < r; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : kBases) {
    if (!witness_u64(n, a, d, r)) return false;
  }
  return true;
}

Natural random_bits(std::mt19937_64& rng, unsigned bits) {
  Natural x = 0;
  for (unsigned done = 0; done < bits; done += 64) {
    x <<= 64;
    x |= Natural(rng());
  }
  unsigned extra = ((bits + 63) / 64) * 64 - bits;
  return x >> extra;
}

Natural random_below(std::mt19937_64& rng, const Natural& bound) {
  unsigned len = bit_length(bound);
  for (;;) {
    Natural x = random_bits(rng, len);
    if (x < bound) return x;
  }
}

bool is_prime_big(const Natural& n) {
  static constexpr std::array<unsigned, 12> kSmall = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (unsigned p : kSmall) {
    if (n % p == 0) return n == p;
  }
  Natural n_minus_1 = n - 1;
  Natural d = n_minus_1;
  unsigned r = 0;
  while (!mp::bit_test(d, 0)) {
    d >>= 1;
    ++r;
  }
  std::mt19937_64 rng(static_cast<std::uint64_t>(n & 0xFFFFFFFFFFFFFFFFull) ^ 0x9E3779B97F4A7C15ull);
  for (int round = 0; round < 64; ++round) {
    Natural a = 2 + random_below(rng, n - 3);  // a in [2, n-2]
    Natural x = mp::powm(a, d, n);
    if (x == 1 || x == n_minus_1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = x * x % n;
      if (x == n_minus_1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Natural random_odd_with_top_bit(std::mt19937_64& rng, unsigned bits) {
  Natural x = random_bits(rng, bits);
  mp::bit_set(x, bits - 1);
  mp::bit_set(x, 0);
  return x;
}

Natural random_prime(std::mt19937_64& rng, unsigned bits) {
  for (;;) {
    Natural x = random_odd_with_top_bit(rng, bits);
    if (is_prime(x)) return x;
  }
}

}  // namespace

PrimeInputError::PrimeInputError(const Natural& n)
    : std::invalid_argument("prime input: " + to_decimal(n) + " has no nontrivial divisor") {}

bool is_prime(const Natural& x) {
  if (x < 2) return false;
  if (bit_length(x) <= 64) return is_prime_u64(x.convert_to<std::uint64_t>());
  return is_prime_big(x);
}

std::vector<std::pair<unsigned, unsigned>> factor_splits(unsigned n_bits) {
  unsigned hi = (n_bits + 1) / 2;
  unsigned lo = n_bits / 2;
  // Two-bit odd numbers contain a single prime (3), so a 4-bit semiprime
  // with distinct factors needs the wider (2, 3) split.
  if (n_bits == 4) return {{2, 3}};
  if (hi == lo) return {{hi, hi}};
  return {{hi, hi}, {lo, hi}};
}

Semiprime gen_semiprime(unsigned n_bits, std::uint64_t seed) {
  if (n_bits < 4) {
    throw std::invalid_argument("gen_semiprime: n_bits must be >= 4, got " + std::to_string(n_bits));
  }
  std::mt19937_64 rng(seed);
  const auto splits = factor_splits(n_bits);
  for (;;) {
    const auto& [m_p, m_q] = splits[splits.size() == 1 ? 0 : rng() % splits.size()];
    Natural a = random_prime(rng, m_p);
    Natural b = random_prime(rng, m_q);
    if (a == b) continue;
    Natural product = a * b;
    if (bit_length(product) != n_bits) continue;
    if (a > b) std::swap(a, b);
    return Semiprime{product, a, b, n_bits};
  }
}

bool is_valid(const Semiprime& s) {
  if (s.p * s.q != s.value) return false;
  if (s.p > s.q) return false;
  if (!is_prime(s.p) || !is_prime(s.q)) return false;
  if (bit_length(s.value) != s.n_bits) return false;
  unsigned lp = bit_length(s.p);
  unsigned lq = bit_length(s.q);
  return (lp > lq ? lp - lq : lq - lp) <= 1;
}

namespace {

std::pair<std::uint64_t, std::uint64_t> trial_division_u64(std::uint64_t n) {
  if (n % 2 == 0) return {2, n / 2};
  for (std::uint64_t d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return {d, n / d};
  }
  return {n, 1};
}

}  // namespace

std::pair<Natural, Natural> trial_division(const Natural& n) {
  if (n < 4) throw PrimeInputError(n);
  if (bit_length(n) <= 64) {
    auto [d, cofactor] = trial_division_u64(n.convert_to<std::uint64_t>());
    if (cofactor == 1) throw PrimeInputError(n);
    return {Natural(d), Natural(cofactor)};
  }
  if (!mp::bit_test(n, 0)) return {Natural(2), n / 2};
  for (Natural d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return {d, n / d};
  }
  throw PrimeInputError(n);
}

Natural largest_prime_factor(const Natural& x) {
  if (x < 2) {
    throw std::invalid_argument("largest_prime_factor: argument must be >= 2, got " + to_decimal(x));
  }
  Natural rest = x;
  Natural largest = 1;
  while (rest % 2 == 0) {
    largest = 2;
    rest /= 2;
  }
  for (Natural d = 3; d * d <= rest; d += 2) {
    while (rest % d == 0) {
      largest = d;
      rest /= d;
    }
  }
  if (rest > 1) largest = rest;
  return largest;
}

MetricVector metrics(const Semiprime& s) {
  MetricVector m;
  m.hw_n = popcount(s.value);
  m.hw_p = popcount(s.p);
  m.hw_q = popcount(s.q);
  m.hw_pxq = popcount(Natural(s.p ^ s.q));
  m.smooth_p1 = largest_prime_factor(s.p - 1);
  m.smooth_q1 = largest_prime_factor(s.q - 1);
  m.abs_diff = s.p > s.q ? Natural(s.p - s.q) : Natural(s.q - s.p);
  m.log2_n = log2_real(s.value);
  return m;
}

std::vector<double> MetricVector::as_reals() const {
  return {static_cast<double>(hw_n),        static_cast<double>(hw_p),
          static_cast<double>(hw_q),        static_cast<double>(hw_pxq),
          smooth_p1.convert_to<double>(),   smooth_q1.convert_to<double>(),
          abs_diff.convert_to<double>(),    log2_n};
}

const std::vector<std::string>& MetricVector::names() {
  static const std::vector<std::string> kNames = {"hw_n",      "hw_p",      "hw_q",     "hw_pxq",
                                                  "smooth_p1", "smooth_q1", "abs_diff", "log2_n"};
  return kNames;
}

void write_semiprimes_csv(std::ostream& out, const std::vector<Semiprime>& list) {
  out << "n_bits,N,p,q\n";
  for (const auto& s : list) {
    out << s.n_bits << ',' << s.value << ',' << s.p << ',' << s.q << '\n';
  }
}

std::vector<Semiprime> read_semiprimes_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("semiprime CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n_bits,N,p,q") {
    throw std::runtime_error("semiprime CSV: expected header 'n_bits,N,p,q', got '" + line + "'");
  }
  std::vector<Semiprime> list;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) {
      throw std::runtime_error("semiprime CSV line " + std::to_string(line_no) + ": expected 4 fields");
    }
    Semiprime s;
    s.n_bits = static_cast<unsigned>(std::stoul(fields[0]));
    s.value = parse_natural(fields[1]);
    s.p = parse_natural(fields[2]);
    s.q = parse_natural(fields[3]);
    if (s.p * s.q != s.value) {
      throw std::runtime_error("semiprime CSV line " + std::to_string(line_no) + ": p*q != N");
    }
    list.push_back(std::move(s));
  }
  return list;
}

}  // namespace numtheory
}  // namespace satfactor
