#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "satfactor/analysis.hpp"

namespace satfactor::analysis {

FitResult fit_exponential(std::span<const CurvePoint> points) {
  if (points.size() < 3) throw AnalysisError("fit_exponential: need at least 3 points");
  const double count = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& p : points) {
    if (!(p.seconds > 0.0)) throw AnalysisError("fit_exponential: times must be positive");
    mean_x += p.n;
    mean_y += std::log2(p.seconds);
  }
  mean_x /= count;
  mean_y /= count;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : points) {
    double dx = p.n - mean_x;
    double dy = std::log2(p.seconds) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw AnalysisError("fit_exponential: all points share the same n");

  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  if (syy == 0.0) {
    fit.r2 = 0.0;
  } else {
    double ss_res = 0.0;
    for (const auto& p : points) {
      double e = std::log2(p.seconds) - (fit.intercept + fit.slope * p.n);
      ss_res += e * e;
    }
    fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

double fitted_seconds(const FitResult& fit, double n) { return std::exp2(fit.intercept + fit.slope * n); }

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw AnalysisError("correlate: series have different lengths");
  if (x.size() < 3) throw AnalysisError("correlate: need at least 3 points");
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

// Returns false when the series has zero variance.
bool standardise(std::vector<double>& v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  if (ss == 0.0) return false;
  double sd = std::sqrt(ss / static_cast<double>(v.size()));
  for (double& x : v) x = (x - mean) / sd;
  return true;
}

}  // namespace

double correlate(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw AnalysisError("correlate: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlate_spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  auto rx = ranks(x);
  auto ry = ranks(y);
  return correlate(rx, ry);
}

double correlate_within_groups(std::span<const double> x, std::span<const double> y,
                               std::span<const unsigned> groups) {
  check_pair(x, y);
  if (groups.size() != x.size()) throw AnalysisError("correlate: group labels have a different length");
  std::map<unsigned, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);

  std::vector<double> zx;
  std::vector<double> zy;
  for (const auto& [group, idx] : members) {
    if (idx.size() < 2) continue;
    std::vector<double> gx;
    std::vector<double> gy;
    for (std::size_t i : idx) {
      gx.push_back(x[i]);
      gy.push_back(y[i]);
    }
    if (!standardise(gx) || !standardise(gy)) continue;
    zx.insert(zx.end(), gx.begin(), gx.end());
    zy.insert(zy.end(), gy.begin(), gy.end());
  }
  return correlate(zx, zy);
}

}  // namespace satfactor::analysis
