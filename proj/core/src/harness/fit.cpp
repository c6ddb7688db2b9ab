#include "sqba/harness/fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sqba::harness {

namespace {

ModelFit fit_one(const std::vector<FitPoint>& pts, std::string name, double (*basis)(double)) {
  ModelFit m;
  m.model = std::move(name);
  double sxy = 0, sxx = 0;
  for (const auto& p : pts) {
    const double x = basis(p.n);
    sxy += x * p.words;
    sxx += x * x;
  }
  m.coef = sxy / sxx;
  for (const auto& p : pts) {
    const double r = p.words - m.coef * basis(p.n);
    m.residuals.push_back(r);
    m.rss += r * r;
  }
  return m;
}

double n_log2n(double n) { return n * std::log(n) * std::log(n); }
double n_squared(double n) { return n * n; }

}  // namespace

FitResult fit_complexity(std::vector<FitPoint> points) {
  std::set<double> grid;
  for (const auto& p : points) {
    if (!(p.n > 1)) throw std::invalid_argument("fit_complexity: n must exceed 1");
    grid.insert(p.n);
  }
  if (grid.size() < 4) throw std::invalid_argument("fit_complexity: need at least 4 distinct n values");
  std::sort(points.begin(), points.end(), [](const FitPoint& a, const FitPoint& b) { return a.n < b.n; });

  FitResult r;
  r.n_log2n = fit_one(points, "n_log2n", n_log2n);
  r.n2 = fit_one(points, "n2", n_squared);
  r.preferred = r.n_log2n.rss <= r.n2.rss ? r.n_log2n.model : r.n2.model;

  // Ratios between consecutive grid points, using the per-n mean.
  std::vector<std::pair<double, double>> means;
  for (double n : grid) {
    double s = 0;
    int k = 0;
    for (const auto& p : points)
      if (p.n == n) s += p.words, ++k;
    means.emplace_back(n, s / k);
  }
  for (std::size_t i = 1; i < means.size(); ++i) r.step_ratios.push_back(means[i].second / means[i - 1].second);
  return r;
}

}  // namespace sqba::harness
