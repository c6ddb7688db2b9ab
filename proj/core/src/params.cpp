#include "sqba/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sqba {

namespace {

constexpr double kThird = 1.0 / 3.0;
constexpr double kChernoffConst = 8.0;
// Guards floor/ceil against representation noise, e.g. (1/3-0.2)*120.
constexpr double kIntegralSlack = 1e-9;

std::uint32_t floor_guarded(double x) { return static_cast<std::uint32_t>(std::floor(x + kIntegralSlack)); }
std::uint32_t ceil_guarded(double x) { return static_cast<std::uint32_t>(std::ceil(x - kIntegralSlack)); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double committee_lambda(std::uint32_t n) { return 8.0 * std::log(static_cast<double>(n)); }

EpsilonRange epsilon_range(std::uint32_t n) {
  const double ln = std::log(static_cast<double>(n));
  return {std::max(3.0 / (8.0 * ln), 0.109) + 1.0 / (8.0 * ln), kThird};
}

EpsilonRange d_range(std::uint32_t n, double epsilon) {
  const double lambda = committee_lambda(n);
  return {std::max(1.0 / lambda, 0.0362), epsilon / 3.0 - 1.0 / (3.0 * lambda)};
}

Parameters derive_params(std::uint32_t n, double epsilon, double d, bool full_participation) {
  if (n < 4) throw RangeError("n >= 4 violated: n = " + std::to_string(n));
  if (!std::isfinite(epsilon) || !std::isfinite(d)) throw RangeError("epsilon and d must be finite");

  Parameters p;
  p.n = n;
  p.epsilon = epsilon;
  p.d = d;
  p.full_participation = full_participation;

  if (full_participation) {
    if (!(epsilon > 0.0 && epsilon <= kThird))
      throw RangeError("0 < epsilon <= 1/3 violated: epsilon = " + fmt(epsilon));
    p.f = floor_guarded((kThird - epsilon) * n);
    p.lambda = n;
    p.W = n - p.f;
    p.B = p.f;
    return p;
  }

  const EpsilonRange er = epsilon_range(n);
  if (!(er.lo < er.hi))
    throw RangeError("n too small: no epsilon satisfies max{3/(8 ln n), 0.109} + 1/(8 ln n) < epsilon < 1/3 for n = " +
                     std::to_string(n));
  if (!(epsilon > er.lo))
    throw RangeError("epsilon > max{3/(8 ln n), 0.109} + 1/(8 ln n) = " + fmt(er.lo) + " violated: epsilon = " + fmt(epsilon));
  if (!(epsilon < er.hi)) throw RangeError("epsilon < 1/3 violated: epsilon = " + fmt(epsilon));

  const EpsilonRange dr = d_range(n, epsilon);
  if (!(dr.lo < dr.hi))
    throw RangeError("n too small: no d satisfies max{1/lambda, 0.0362} < d < epsilon/3 - 1/(3 lambda) for n = " +
                     std::to_string(n) + ", epsilon = " + fmt(epsilon));
  if (!(d > dr.lo)) throw RangeError("d > max{1/lambda, 0.0362} = " + fmt(dr.lo) + " violated: d = " + fmt(d));
  if (!(d < dr.hi)) throw RangeError("d < epsilon/3 - 1/(3 lambda) = " + fmt(dr.hi) + " violated: d = " + fmt(d));

  p.f = floor_guarded((kThird - epsilon) * n);
  p.lambda = committee_lambda(n);
  p.W = ceil_guarded((2.0 / 3.0 + 3.0 * d) * p.lambda);
  p.B = floor_guarded((kThird - d) * p.lambda);
  if (!(p.B < p.W) || !(2 * p.B < p.W + 1))
    throw RangeError("threshold relation B < W, 2B < W + 1 violated");
  return p;
}

double coin_success_bound(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= kThird)) throw DomainError("coin_success_bound: epsilon outside (0, 1/3]");
  return (18.0 * epsilon * epsilon + 24.0 * epsilon - 1.0) / (6.0 * (1.0 + 6.0 * epsilon));
}

double whp_coin_success_bound(double d) {
  if (!(d > 0.0 && d < 1.0)) throw DomainError("whp_coin_success_bound: d outside (0, 1)");
  return (18.0 * d * d + 27.0 * d - 1.0) / (3.0 * (5.0 + 6.0 * d) * (1.0 - d) * (1.0 + 9.0 * d));
}

double common_value_lower_bound(const Parameters& p, bool committee_mode) {
  if (committee_mode) return p.d * (11.0 - 3.0 * p.d) / (1.0 + 9.0 * p.d) * p.lambda;
  return 9.0 * p.epsilon / (1.0 + 6.0 * p.epsilon) * p.n;
}

ChernoffExponents chernoff_exponents(const Parameters& p) {
  if (p.full_participation) throw DomainError("chernoff_exponents: undefined in full participation mode");
  const double d = p.d;
  const double eps = p.epsilon;
  const double dprime = 3.0 * d + 1.0 / p.lambda;
  const double mean3 = 2.0 / 3.0 + eps;
  const double delta3 = 1.0 - (2.0 / 3.0 + dprime) / mean3;
  const double mean4 = kThird - eps;
  const double delta4 = (eps - d) / mean4;

  ChernoffExponents c;
  c.c1 = kChernoffConst * d * d / (2.0 + d);
  c.c2 = kChernoffConst * d * d / 2.0;
  c.c3 = kChernoffConst * delta3 * delta3 * mean3 / 2.0;
  c.c4 = kChernoffConst * (delta4 * delta4 * mean4) / (2.0 + delta4);
  if (!(c.c1 > 0 && c.c2 > 0 && c.c3 > 0 && c.c4 > 0 && delta3 > 0))
    throw DomainError("chernoff_exponents: non-positive exponent for epsilon = " + fmt(eps) + ", d = " + fmt(d));
  return c;
}

SamplingBounds sampling_failure_bounds(const Parameters& p) {
  const ChernoffExponents c = chernoff_exponents(p);
  const double n = p.n;
  return {std::pow(n, -c.c1), std::pow(n, -c.c2), std::pow(n, -c.c3), std::pow(n, -c.c4)};
}

SFlags evaluate_s_properties(const Parameters& p, CommitteeCounts c) {
  SFlags s;
  const double size = c.size;
  s.s1 = size <= (1.0 + p.d) * p.lambda;
  s.s2 = size >= (1.0 - p.d) * p.lambda;
  if (p.full_participation) s.s1 = s.s2 = true;
  s.s3 = c.correct() >= p.W;
  s.s4 = c.byzantine <= p.B;
  // Smallest possible overlap of an a-subset and a b-subset of C is a + b - |C|.
  const long long m = c.size;
  if (m >= static_cast<long long>(p.W)) {
    s.s5 = 2LL * p.W - m >= static_cast<long long>(p.B) + 1;
    s.s6 = static_cast<long long>(p.B) + 1 + p.W - m >= 1;
  }
  return s;
}

std::string describe(const Parameters& p) {
  std::ostringstream os;
  os << "n=" << p.n << " epsilon=" << p.epsilon << " f=" << p.f << " lambda=" << p.lambda << " d=" << p.d
     << " W=" << p.W << " B=" << p.B << (p.full_participation ? " full_participation" : "");
  return os.str();
}

}  // namespace sqba
