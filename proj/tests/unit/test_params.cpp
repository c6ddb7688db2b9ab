#include <gtest/gtest.h>

#include <cmath>

#include "sqba/params.hpp"

using namespace sqba;

// Reference values below were computed once with a 40-digit symbolic
// evaluation (tests/oracle/oracle.py) and frozen here.

TEST(DeriveParams, N1024) {
  const Parameters p = derive_params(1024, 0.2, 0.05);
  EXPECT_NEAR(p.lambda, 55.451774444795623, 1e-12);
  EXPECT_EQ(p.f, 136u);
  EXPECT_EQ(p.W, 46u);
  EXPECT_EQ(p.B, 15u);
  EXPECT_FALSE(p.full_participation);
}

TEST(DeriveParams, OracleGrid) {
  struct Row {
    std::uint32_t n, f, W, B;
    double lambda;
  };
  const Row rows[] = {
      {120, 16, 32, 10, 38.299933942256368},   {250, 33, 37, 12, 44.171687342897971},
      {500, 66, 41, 14, 49.716864787377534},   {1000, 133, 46, 15, 55.262042231857096},
      {2000, 266, 50, 17, 60.807219676336659}, {10000, 1333, 61, 20, 73.682722975809462},
  };
  for (const Row& r : rows) {
    SCOPED_TRACE(r.n);
    const Parameters p = derive_params(r.n, 0.2, 0.05);
    EXPECT_EQ(p.f, r.f);
    EXPECT_EQ(p.W, r.W);
    EXPECT_EQ(p.B, r.B);
    EXPECT_NEAR(p.lambda, r.lambda, 1e-12);
  }
}

TEST(DeriveParams, RangeEndpoints) {
  EXPECT_NEAR(epsilon_range(120).lo, 0.13510970560700364, 1e-14);
  EXPECT_NEAR(epsilon_range(1000).lo, 0.12709560341263549, 1e-14);
  EXPECT_DOUBLE_EQ(epsilon_range(1000).hi, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(d_range(1000, 0.2).lo, 0.0362);
  EXPECT_NEAR(d_range(120, 0.2).hi, 0.057963431464332121, 1e-14);
  EXPECT_NEAR(d_range(1000, 0.2).hi, 0.060634798862454836, 1e-14);
}

TEST(DeriveParams, DTooLarge) { EXPECT_THROW(derive_params(1024, 0.2, 0.2), RangeError); }

TEST(DeriveParams, Rejections) {
  EXPECT_THROW(derive_params(3, 0.2, 0.05), RangeError);
  EXPECT_THROW(derive_params(1024, 0.1, 0.03), RangeError);   // epsilon below the lower bound
  EXPECT_THROW(derive_params(1024, 1.0 / 3.0, 0.05), RangeError);
  EXPECT_THROW(derive_params(1024, 0.2, 0.03), RangeError);   // d below 0.0362
  EXPECT_THROW(derive_params(1024, NAN, 0.05), RangeError);
  // At n = 4 the lower bound on epsilon already exceeds 1/3.
  EXPECT_GT(epsilon_range(4).lo, 1.0 / 3.0);
  EXPECT_THROW(derive_params(4, 0.3, 0.05), RangeError);
}

TEST(DeriveParams, FullParticipation) {
  const Parameters p = derive_params(16, 1.0 / 3.0 - 1e-9, 0.7, true);
  EXPECT_EQ(p.f, 0u);
  EXPECT_EQ(p.W, 16u);
  EXPECT_EQ(p.B, 0u);
  EXPECT_DOUBLE_EQ(p.lambda, 16.0);

  const Parameters q = derive_params(120, 0.2, 0.05, true);
  EXPECT_EQ(q.f, 16u);
  EXPECT_EQ(q.W, 104u);
  EXPECT_EQ(q.B, 16u);
  EXPECT_THROW(derive_params(16, 0.0, 0.05, true), RangeError);
}

TEST(Bounds, CoinSuccess) {
  EXPECT_DOUBLE_EQ(coin_success_bound(1.0 / 3.0), 0.5);
  EXPECT_NEAR(coin_success_bound(0.2), 0.34242424242424242, 1e-15);
  EXPECT_NEAR(coin_success_bound(0.109), 0.18438714228133817, 1e-15);
  EXPECT_THROW(coin_success_bound(0.0), DomainError);
  EXPECT_THROW(coin_success_bound(0.4), DomainError);
}

TEST(Bounds, CoinSuccessMonotone) {
  double prev = coin_success_bound(0.109);
  for (int i = 1; i <= 1000; ++i) {
    const double e = 0.109 + (1.0 / 3.0 - 0.109) * i / 1000.0;
    const double b = coin_success_bound(e);
    ASSERT_GT(b, prev) << e;
    prev = b;
  }
}

TEST(Bounds, WhpCoinSuccess) {
  EXPECT_NEAR(whp_coin_success_bound(0.05), 0.018034676802611604, 1e-15);
  EXPECT_NEAR(whp_coin_success_bound(0.0362), 0.0, 1e-3);
  EXPECT_NEAR(whp_coin_success_bound((-27.0 + std::sqrt(801.0)) / 36.0), 0.0, 1e-15);
  EXPECT_THROW(whp_coin_success_bound(0.0), DomainError);
}

TEST(Bounds, CommonValue) {
  EXPECT_NEAR(common_value_lower_bound(derive_params(100, 1.0 / 3.0, 0.05, true), false), 100.0, 1e-12);
  EXPECT_NEAR(common_value_lower_bound(derive_params(1000, 0.2, 0.05), false), 818.18181818181818, 1e-9);
  EXPECT_NEAR(common_value_lower_bound(derive_params(120, 0.2, 0.05), false), 98.181818181818182, 1e-12);
  EXPECT_NEAR(common_value_lower_bound(derive_params(1000, 0.2, 0.05), true), 20.675626145367224, 1e-12);
  EXPECT_NEAR(common_value_lower_bound(derive_params(2000, 0.2, 0.05), true), 22.750287361663888, 1e-12);
  EXPECT_NEAR(common_value_lower_bound(derive_params(1024, 0.2, 0.05), true), 20.746612162966642, 1e-12);
}

TEST(Bounds, ChernoffExponents) {
  const ChernoffExponents c = chernoff_exponents(derive_params(1000, 0.2, 0.05));
  EXPECT_NEAR(c.c1, 0.0097560975609756098, 1e-15);
  EXPECT_NEAR(c.c2, 0.01, 1e-15);
  EXPECT_NEAR(c.c3, 0.0046979562535561662, 1e-15);
  EXPECT_NEAR(c.c4, 0.432, 1e-14);
  EXPECT_NEAR(chernoff_exponents(derive_params(1024, 0.2, 0.05)).c3, 0.0047162081638657937, 1e-15);

  const SamplingBounds b = sampling_failure_bounds(derive_params(10000, 0.2, 0.05));
  EXPECT_NEAR(b.s1, 0.91406190575268594, 1e-14);
  EXPECT_NEAR(b.s2, 0.91201083935590974, 1e-14);
  EXPECT_NEAR(b.s3, 0.94515090269465769, 1e-14);
  EXPECT_NEAR(b.s4, 0.018706821403658006, 1e-14);
  EXPECT_THROW(chernoff_exponents(derive_params(64, 1.0 / 3.0, 0.05, true)), DomainError);
}

TEST(SProperties, Evaluate) {
  const Parameters p = derive_params(1000, 0.2, 0.05);  // lambda 55.26, W 46, B 15
  SFlags s = evaluate_s_properties(p, {55, 0});
  EXPECT_TRUE(s.all());
  s = evaluate_s_properties(p, {59, 0});
  EXPECT_FALSE(s.s1);
  s = evaluate_s_properties(p, {52, 0});
  EXPECT_FALSE(s.s2);
  s = evaluate_s_properties(p, {55, 10});
  EXPECT_FALSE(s.s3);
  EXPECT_TRUE(s.s4);
  s = evaluate_s_properties(p, {70, 16});
  EXPECT_FALSE(s.s4);
  EXPECT_TRUE(s.s5);  // 92 - 70 = 22 >= 16
  s = evaluate_s_properties(p, {77, 0});
  EXPECT_FALSE(s.s5);  // 92 - 77 = 15 < 16
  EXPECT_FALSE(s.s6);  // 16 + 46 - 77 < 1
  s = evaluate_s_properties(p, {61, 0});
  EXPECT_TRUE(s.s6);   // 16 + 46 - 61 = 1
}

// Grid over valid (n, epsilon, d). Each derived triple must satisfy the
// counting facts the committee thresholds rely on.
TEST(ParamsProperty, ValidGrid) {
  int valid = 0;
  for (int k = 0; k < 40; ++k) {
    const auto n = static_cast<std::uint32_t>(std::lround(200.0 * std::pow(10.0, 3.0 * k / 39.0)));
    const EpsilonRange er = epsilon_range(n);
    for (int i = 1; i < 12; ++i) {
      const double eps = er.lo + (er.hi - er.lo) * i / 12.0;
      const EpsilonRange dr = d_range(n, eps);
      if (!(dr.lo < dr.hi)) continue;
      for (int j = 1; j < 8; ++j) {
        const double d = dr.lo + (dr.hi - dr.lo) * j / 8.0;
        const Parameters p = derive_params(n, eps, d);
        ++valid;
        const double lam = p.lambda;
        ASSERT_GT(6.0 * d * lam, 1.0);
        ASSERT_GT(d * lam, 1.0);
        ASSERT_LE(p.W, (2.0 / 3.0 + 3.0 * d) * lam + 1.0);
        ASSERT_LE(p.B, (1.0 / 3.0 - d) * lam);
        ASSERT_LE(p.B + 1, p.W);
        ASSERT_GT(p.W / 2.0, double(p.B));
        ASSERT_LE(double(p.f), (1.0 / 3.0 - eps) * n);
        const auto cmax = static_cast<long long>(std::ceil((1.0 + d) * lam));
        ASSERT_GE(2LL * p.W - cmax, static_cast<long long>(p.B) + 1);
        ASSERT_GE(static_cast<long long>(p.B) + 1 + p.W - cmax, 1);
        ASSERT_GT(whp_coin_success_bound(d), 0.0);
        const ChernoffExponents c = chernoff_exponents(p);
        ASSERT_GT(c.c3, 0.0);
        ASSERT_GT(c.c4, 0.0);
      }
    }
  }
  EXPECT_GE(valid, 1000);
}
