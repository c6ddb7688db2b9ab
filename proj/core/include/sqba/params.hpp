#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sqba {

class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Parameters {
  std::uint32_t n = 0;
  double epsilon = 0;
  std::uint32_t f = 0;
  double lambda = 0;
  double d = 0;
  std::uint32_t W = 0;
  std::uint32_t B = 0;
  bool full_participation = false;
};

struct EpsilonRange {
  double lo;  // exclusive
  double hi;  // exclusive
};

// Open intervals admitted for epsilon and, given epsilon, for d.
EpsilonRange epsilon_range(std::uint32_t n);
EpsilonRange d_range(std::uint32_t n, double epsilon);

double committee_lambda(std::uint32_t n);

Parameters derive_params(std::uint32_t n, double epsilon, double d, bool full_participation = false);

double coin_success_bound(double epsilon);
double whp_coin_success_bound(double d);
double common_value_lower_bound(const Parameters& p, bool committee_mode);

struct ChernoffExponents {
  double c1, c2, c3, c4;
};
ChernoffExponents chernoff_exponents(const Parameters& p);

// n^(-c) for each exponent.
struct SamplingBounds {
  double s1, s2, s3, s4;
};
SamplingBounds sampling_failure_bounds(const Parameters& p);

// Committee composition and the S1-S6 predicates evaluated on it.
struct CommitteeCounts {
  std::uint32_t size = 0;
  std::uint32_t byzantine = 0;
  std::uint32_t correct() const { return size - byzantine; }
};

struct SFlags {
  bool s1 = true;  // |C| <= (1+d)lambda
  bool s2 = true;  // |C| >= (1-d)lambda
  bool s3 = true;  // at least W correct members
  bool s4 = true;  // at most B Byzantine members
  bool s5 = true;  // any two W-subsets share B+1 members
  bool s6 = true;  // any (B+1)-subset meets any W-subset
  bool all() const { return s1 && s2 && s3 && s4 && s5 && s6; }
};

SFlags evaluate_s_properties(const Parameters& p, CommitteeCounts c);

std::string describe(const Parameters& p);

}  // namespace sqba
