#pragma once

// Runtime-curve regression, variable incidence graphs and their community
// structure, metric/runtime correlation, and the classical vs. quantum vs.
// number-field-sieve cost estimator.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "satfactor/cnf.hpp"

namespace satfactor::analysis {

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Regression

/// log2(seconds) ~ intercept + slope * n.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Operations-form fit of the reference classical solver: 2^16.8 * 2^0.495n.
inline constexpr FitResult kReferenceOpsFit{0.495, 16.8, 1.0};

struct CurvePoint {
  double n = 0.0;
  double seconds = 0.0;
};

/// Ordinary least squares on log2 times. Needs >= 3 points with positive
/// times. When all times are equal the slope is 0 and r2 is 0.
FitResult fit_exponential(std::span<const CurvePoint> points);

/// Fitted time at n: 2^(intercept + slope*n).
double fitted_seconds(const FitResult& fit, double n);

// ---------------------------------------------------------------------------
// Community structure

/// Simple undirected graph; vertices are 0-based (variable id - 1).
class Graph {
 public:
  explicit Graph(std::size_t vertices = 0) : adj_(vertices) {}

  std::size_t vertex_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edges_; }
  /// Ignores self-loops and repeated edges. Returns true if inserted.
  bool add_edge(std::size_t u, std::size_t v);
  bool has_edge(std::size_t u, std::size_t v) const;
  const std::vector<std::size_t>& neighbours(std::size_t v) const { return adj_[v]; }
  std::size_t degree(std::size_t v) const { return adj_[v].size(); }

 private:
  std::vector<std::vector<std::size_t>> adj_;  // sorted
  std::size_t edges_ = 0;
};

/// Variable incidence graph: a clique over the variables of each clause.
Graph build_vig(const cnf::Formula& f);

using Partition = std::vector<std::size_t>;  // vertex -> community id

/// Q = sum_c (e_c/m - (d_c/2m)^2). Throws AnalysisError on an edgeless
/// graph or a partition of the wrong size.
double modularity(const Graph& g, const Partition& partition);

struct CommunityResult {
  Partition partition;  // community ids are 0..k-1 in first-seen order
  double q = 0.0;
};

/// Greedy agglomeration (Clauset-Newman-Moore): start from singletons and
/// merge the connected pair of communities with the largest modularity gain
/// while that gain is positive. Ties go to the lexicographically smallest
/// community pair.
CommunityResult cnm_communities(const Graph& g);

// ---------------------------------------------------------------------------
// Correlation

/// Pearson r. Throws AnalysisError on length mismatch, fewer than 3 points
/// or zero variance.
double correlate(std::span<const double> x, std::span<const double> y);
/// Spearman rank correlation (average ranks for ties).
double correlate_spearman(std::span<const double> x, std::span<const double> y);
/// Pearson r after standardising x and y within each group (e.g. bit
/// length), so that a shared trend across groups does not count as
/// correlation. Groups with fewer than 2 members or zero variance in
/// either series are skipped.
double correlate_within_groups(std::span<const double> x, std::span<const double> y,
                               std::span<const unsigned> groups);

// ---------------------------------------------------------------------------
// Cost estimation

inline constexpr double kUniverseLifetimeSeconds = 4.35e17;
inline constexpr double kDefaultClassicalRate = 1e10;
inline constexpr double kDefaultQuantumRate = 1e40;

/// All operation and time fields are log2 values so that they stay finite
/// far beyond double range; universe_lifetimes is a plain ratio.
struct QuantumEstimate {
  unsigned n_bits = 0;
  double classical_ops_log2 = 0.0;
  double quantum_ops_log2 = 0.0;
  double nfs_ops_log2 = 0.0;
  double classical_seconds_log2 = 0.0;
  double quantum_seconds_log2 = 0.0;
  double universe_lifetimes = 0.0;
};

struct EstimatorConfig {
  FitResult fit = kReferenceOpsFit;
  double classical_rate = kDefaultClassicalRate;
  double quantum_rate = kDefaultQuantumRate;
  double universe_lifetime_s = kUniverseLifetimeSeconds;
};

/// Classical ops 2^(intercept + slope*n); a quadratic speedup halves the
/// exponent. NFS uses L_N[1/3, (64/9)^(1/3)] with N = 2^n.
QuantumEstimate estimate_costs(unsigned n, const EstimatorConfig& cfg = {});

/// log2 of L_N[1/3, (64/9)^(1/3)] for N = 2^n, o(1) taken as 0. Needs n >= 8.
double nfs_ops(unsigned n);

}  // namespace satfactor::analysis
