#pragma once

// Arbitrary-precision number theory used to build and check factoring
// instances: primality, balanced semiprime sampling, the trial-division
// baseline, and per-number metrics for correlation studies.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace satfactor {

/// Exact non-negative integer. Signed cpp_int is used so that differences
/// like p - q stay well-defined; every public API keeps values >= 0.
using Natural = boost::multiprecision::cpp_int;

/// Number of significant bits; bit_length(0) == 0.
unsigned bit_length(const Natural& x);
unsigned popcount(const Natural& x);
bool test_bit(const Natural& x, unsigned index);
double log2_real(const Natural& x);

Natural parse_natural(const std::string& decimal);
std::string to_decimal(const Natural& x);

namespace numtheory {

class PrimeInputError : public std::invalid_argument {
 public:
  explicit PrimeInputError(const Natural& n);
};

struct Semiprime {
  Natural value;
  Natural p;
  Natural q;
  unsigned n_bits = 0;

  friend bool operator==(const Semiprime&, const Semiprime&) = default;
};

struct MetricVector {
  unsigned hw_n = 0;
  unsigned hw_p = 0;
  unsigned hw_q = 0;
  unsigned hw_pxq = 0;
  Natural smooth_p1;  // largest prime factor of p - 1
  Natural smooth_q1;  // largest prime factor of q - 1
  Natural abs_diff;
  double log2_n = 0.0;

  /// The eight metrics in a fixed order, as reals for correlation.
  std::vector<double> as_reals() const;
  static const std::vector<std::string>& names();
};

/// Miller-Rabin. Deterministic witness set below 2^64, otherwise 64 bases
/// drawn from a generator seeded by x itself (so the answer is a pure
/// function of x).
bool is_prime(const Natural& x);

/// Allowed (m_p, m_q) factor bit-length pairs for an n-bit semiprime,
/// smaller width first.
std::vector<std::pair<unsigned, unsigned>> factor_splits(unsigned n_bits);

/// Samples distinct odd primes p < q with bit_length(p*q) == n_bits.
/// Throws std::invalid_argument for n_bits < 4.
Semiprime gen_semiprime(unsigned n_bits, std::uint64_t seed);

bool is_valid(const Semiprime& s);

/// Smallest factor first; candidates 2, 3, 5, 7, 9, ... up to sqrt(N).
/// Throws PrimeInputError when no divisor exists.
std::pair<Natural, Natural> trial_division(const Natural& n);

Natural largest_prime_factor(const Natural& x);

MetricVector metrics(const Semiprime& s);

void write_semiprimes_csv(std::ostream& out, const std::vector<Semiprime>& list);
std::vector<Semiprime> read_semiprimes_csv(std::istream& in);

}  // namespace numtheory
}  // namespace satfactor
