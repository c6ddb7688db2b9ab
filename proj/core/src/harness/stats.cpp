#include "sqba/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sqba::harness {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = double(trials);
  const double p = double(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double binomial_sigma(double p, std::uint64_t trials) {
  if (trials == 0) return 0;
  p = std::clamp(p, 0.0, 1.0);
  return std::sqrt(p * (1 - p) / double(trials));
}

Summary summarize(std::vector<double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * double(xs.size())));
    return xs[std::min(xs.size() - 1, k == 0 ? 0 : k - 1)];
  };
  s.p50 = rank(0.50);
  s.p90 = rank(0.90);
  s.p99 = rank(0.99);
  s.max = xs.back();
  return s;
}

}  // namespace sqba::harness
