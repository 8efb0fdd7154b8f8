#include "fewbit/special.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace fb = fewbit;

TEST(NormCdf, KnownValues) {
  EXPECT_NEAR(fb::norm_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(fb::norm_cdf(1.0), 0.8413447460685429, 1e-12);
  EXPECT_EQ(fb::norm_cdf(fb::kInf), 1.0);
  EXPECT_EQ(fb::norm_cdf(-fb::kInf), 0.0);
}

TEST(NormCdfDiff, MatchesPlainDifferenceInTheBulk) {
  for (double a : {-3.0, -1.0, 0.0, 0.5}) {
    for (double w : {0.1, 1.0, 4.0}) {
      double direct = fb::norm_cdf(a + w) - fb::norm_cdf(a);
      EXPECT_NEAR(fb::norm_cdf_diff(a, a + w), direct, 1e-14);
    }
  }
}

TEST(NormCdfDiff, DeepTailStaysPositive) {
  double z = fb::norm_cdf_diff(-31.0, -30.0);
  EXPECT_GT(z, 0.0);
  // Phi(-30) dominates; ratio against the analytic tail approximation
  // phi(30)/30 is within a couple percent.
  double approx = fb::norm_pdf(30.0) / 30.0;
  EXPECT_NEAR(z / approx, 1.0, 0.05);
}

TEST(Sigmoid, TailsAndCenter) {
  EXPECT_NEAR(fb::sigmoid(0.0), 0.5, 1e-15);
  EXPECT_NEAR(fb::sigmoid(710.0), 1.0, 1e-15);
  EXPECT_GT(fb::sigmoid(-710.0), 0.0);
  EXPECT_NEAR(fb::sigmoid(-3.0) + fb::sigmoid(3.0), 1.0, 1e-15);
}

TEST(Softplus, StableBothSides) {
  EXPECT_NEAR(fb::softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(fb::softplus(800.0), 800.0, 1e-12);
  EXPECT_NEAR(fb::softplus(-40.0), std::exp(-40.0), 1e-25);
}

// Independent reference: Li2(x) = -int_0^1 log(1 - x t)/t dt by Simpson.
static double dilog_reference(double x) {
  const long n = 2000000;
  double h = 1.0 / n;
  double acc = 0.0;
  for (long j = 0; j <= n; ++j) {
    double t = j * h;
    double f = (t == 0.0) ? -x : std::log1p(-x * t) / t;
    double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return -acc * h / 3.0;
}

TEST(Dilog, MatchesQuadrature) {
  EXPECT_NEAR(fb::dilog_neg_exp(0.0), -std::numbers::pi * std::numbers::pi / 12.0, 1e-13);
  for (double v : {-5.0, -1.0, -0.3, 0.4, 2.0, 9.0}) {
    double x = -std::exp(v);
    EXPECT_NEAR(fb::dilog_neg_exp(v), dilog_reference(x), 1e-10) << "v=" << v;
  }
  // Deep tails: series limits.
  EXPECT_NEAR(fb::dilog_neg_exp(-50.0), -std::exp(-50.0), 1e-36);
  double v = 400.0;
  EXPECT_NEAR(fb::dilog_neg_exp(v),
              -std::numbers::pi * std::numbers::pi / 6.0 - 0.5 * v * v, 1e-9);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto& gl = fb::gl48();
  double acc = 0.0;
  for (int i = 0; i < 48; ++i) acc += gl.weight[i];
  EXPECT_NEAR(acc, 2.0, 1e-13);
  double m2 = 0.0, m7 = 0.0;
  for (int i = 0; i < 48; ++i) {
    m2 += gl.weight[i] * gl.node[i] * gl.node[i];
    m7 += gl.weight[i] * std::pow(gl.node[i], 7);
  }
  EXPECT_NEAR(m2, 2.0 / 3.0, 1e-13);
  EXPECT_NEAR(m7, 0.0, 1e-13);
}
