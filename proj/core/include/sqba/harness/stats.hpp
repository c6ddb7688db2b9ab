#pragma once

#include <cstdint>
#include <vector>

namespace sqba::harness {

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99%

struct Interval {
  double lo = 0;
  double hi = 1;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ99);

// Standard deviation of an empirical frequency over `trials` draws with rate p.
double binomial_sigma(double p, std::uint64_t trials);

struct Summary {
  std::uint64_t count = 0;
  double mean = 0;
  double p50 = 0;
  double p90 = 0;
  double p99 = 0;
  double max = 0;
};

// Nearest-rank percentiles.
Summary summarize(std::vector<double> xs);

}  // namespace sqba::harness
