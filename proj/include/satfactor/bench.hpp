#pragma once

// Experiment driver: generates semiprimes from a master seed, runs the
// configured solving strategy on every instance, verifies every reported
// factorization and collects one RunRecord per solver call.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satfactor/dimacs.hpp"
#include "satfactor/encoder.hpp"
#include "satfactor/numtheory.hpp"

namespace satfactor::bench {

enum class Strategy { Mean, Min, MultiTarget, TrialDivision };

const char* to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Derives an independent 64-bit seed for a named stream and a tuple of
/// indices, e.g. derive_seed(master, "solver", {n_bits, instance, k}).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::initializer_list<std::uint64_t> indices);

struct ExperimentPlan {
  std::vector<unsigned> bitlengths;
  unsigned semiprimes_per_n = 20;
  unsigned seeds_per_instance = 3;
  Strategy strategy = Strategy::Mean;
  encoder::Algorithm algorithm = encoder::Algorithm::Schoolbook;
  std::optional<std::string> external_cmd;  // embedded solver when empty
  std::uint64_t master_seed = 0;
  std::optional<double> time_limit;  // seconds per run
  unsigned workers = 1;              // does not affect the Dataset

  /// Bit lengths 10..26 step 2, 20 semiprimes each, 3 seeds.
  static ExperimentPlan desk_scale();
  void validate() const;
  /// FNV-1a over the canonical plan text; workers are excluded.
  std::string fingerprint() const;
  std::string solver_name() const { return external_cmd ? "external" : "embedded"; }
};

struct RunRecord {
  Strategy strategy = Strategy::Mean;
  encoder::Algorithm algorithm = encoder::Algorithm::Schoolbook;
  std::string solver = "embedded";
  unsigned n_bits = 0;
  Natural n;
  std::uint64_t solver_seed = 0;
  cnf::SolveStatus status = cnf::SolveStatus::Unknown;
  double wall_time_s = 0.0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::optional<std::size_t> matched_target;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Dataset {
  std::string plan_fingerprint;
  std::vector<RunRecord> records;

  /// Canonical order: (n_bits, N, solver_seed).
  void sort();
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// The semiprimes a plan will use for one bit length, in order.
std::vector<numtheory::Semiprime> plan_semiprimes(const ExperimentPlan& plan, unsigned n_bits);

Dataset run_experiment(const ExperimentPlan& plan);

enum class Stat { Mean, Median, Min, Sum };

const char* to_string(Stat s);
Stat parse_stat(std::string_view name);
double apply_stat(std::vector<double> values, Stat stat);

struct AggregatePoint {
  unsigned n_bits = 0;
  Natural n;
  double seconds = 0.0;
};

struct Aggregate {
  std::vector<AggregatePoint> points;  // sorted by (n_bits, N)
  std::size_t unknown_excluded = 0;
};

/// Per-(n_bits, N) statistic over solver seeds; UNKNOWN rows are excluded
/// and counted.
Aggregate aggregate(const Dataset& d, Stat stat);

/// Collapses per-instance points to one value per bit length.
std::vector<std::pair<unsigned, double>> per_bitlength(const std::vector<AggregatePoint>& points, Stat stat);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_csv(const Dataset& d, std::ostream& out);
Dataset load_csv(std::istream& in);
void save_csv(const Dataset& d, const std::string& path);
Dataset load_csv(const std::string& path);

}  // namespace satfactor::bench
