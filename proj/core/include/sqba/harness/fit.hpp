#pragma once

#include <string>
#include <vector>

namespace sqba::harness {

struct FitPoint {
  double n = 0;
  double words = 0;
};

struct ModelFit {
  std::string model;  // "n_log2n" or "n2"
  double coef = 0;    // least squares through the origin
  double rss = 0;
  std::vector<double> residuals;
};

struct FitResult {
  ModelFit n_log2n;
  ModelFit n2;
  std::string preferred;
  // words(n_{i+1}) / words(n_i) over the sorted grid.
  std::vector<double> step_ratios;
};

// Needs at least four distinct values of n; throws std::invalid_argument otherwise.
FitResult fit_complexity(std::vector<FitPoint> points);

}  // namespace sqba::harness
