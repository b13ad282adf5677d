#include <cmath>
#include <numbers>

#include "satfactor/analysis.hpp"

namespace satfactor::analysis {

namespace {

// log2 L_N[1/3, c] for N = 2^n; finite for n >= 2.
double nfs_log2(unsigned n) {
  const double c = std::cbrt(64.0 / 9.0);
  const double ln_n = static_cast<double>(n) * std::numbers::ln2;
  const double exponent = c * std::cbrt(ln_n) * std::pow(std::log(ln_n), 2.0 / 3.0);
  return exponent / std::numbers::ln2;
}

}  // namespace

double nfs_ops(unsigned n) {
  if (n < 8) throw AnalysisError("nfs_ops: n must be >= 8");
  return nfs_log2(n);
}

QuantumEstimate estimate_costs(unsigned n, const EstimatorConfig& cfg) {
  if (!(cfg.classical_rate > 0.0) || !(cfg.quantum_rate > 0.0)) {
    throw AnalysisError("estimate_costs: rates must be positive");
  }
  if (!(cfg.universe_lifetime_s > 0.0)) throw AnalysisError("estimate_costs: universe lifetime must be positive");
  QuantumEstimate e;
  e.n_bits = n;
  e.classical_ops_log2 = cfg.fit.intercept + cfg.fit.slope * static_cast<double>(n);
  e.quantum_ops_log2 = e.classical_ops_log2 / 2.0;
  e.nfs_ops_log2 = n >= 2 ? nfs_log2(n) : 0.0;
  e.classical_seconds_log2 = e.classical_ops_log2 - std::log2(cfg.classical_rate);
  e.quantum_seconds_log2 = e.quantum_ops_log2 - std::log2(cfg.quantum_rate);
  e.universe_lifetimes = std::exp2(e.quantum_seconds_log2 - std::log2(cfg.universe_lifetime_s));
  return e;
}

}  // namespace satfactor::analysis
