#pragma once

#include <array>
#include <cstdint>

#include "sqba/params.hpp"

namespace sqba::harness {

struct SamplingConfig {
  Parameters params;
  std::uint64_t committees = 1000;
  std::uint64_t seed = 1;
  // Corrupted set is {0..f-1} unless randomized; either way it is fixed
  // before any sampling string is evaluated.
  bool randomized_placement = false;
  std::uint32_t subset_draws = 16;  // random subset pairs per committee for S5/S6
};

struct SamplingReport {
  std::uint64_t committees = 0;
  std::array<std::uint64_t, 6> failures{};     // S1..S6 by the size predicates
  std::array<double, 4> analytic{};            // n^-c1 .. n^-c4
  std::array<double, 4> sigma{};               // binomial sigma at the analytic rate
  std::array<bool, 4> within_bound{};          // rate <= analytic + 3 sigma
  std::uint64_t subset_checked = 0;            // committees satisfying S1
  std::uint64_t s5_subset_failures = 0;        // W/W pairs sharing <= B members
  std::uint64_t s6_subset_failures = 0;        // (B+1)/W pairs sharing nothing
  double rate(int i) const { return committees ? double(failures[i]) / double(committees) : 0.0; }
  bool passed() const;
};

SamplingReport verify_sampling_properties(const SamplingConfig& cfg);

}  // namespace sqba::harness
