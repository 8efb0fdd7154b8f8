#include "fewbit/stat_kernels.hpp"

#include <gtest/gtest.h>

#include "fewbit/verify.hpp"

namespace fb = fewbit;
using fb::CdfMode;
using fb::ComplexInterval;
using fb::cplx;
using fb::kInf;

TEST(TruncatedMoments, UntruncatedReproducesPlainGaussian) {
  ComplexInterval all;
  fb::MomentPair mp = fb::truncated_complex_moments(cplx(1.0, 2.0), 0.5, all,
                                                    CdfMode::ExactNormal);
  EXPECT_EQ(mp.mean, cplx(1.0, 2.0));
  EXPECT_NEAR(mp.var, 2.0, 1e-14);  // var = 1/gamma
}

TEST(TruncatedMoments, SymmetricBoxHasZeroMeanAndQuadratureVariance) {
  ComplexInterval box{-1.0, 1.0, -1.0, 1.0};
  fb::MomentPair mp = fb::truncated_complex_moments(cplx(0.0, 0.0), 1.0, box,
                                                    CdfMode::ExactNormal);
  EXPECT_NEAR(std::abs(mp.mean), 0.0, 1e-14);
  fb::verify::QuadMoments q =
      fb::verify::quadrature_moments(cplx(0.0, 0.0), 1.0, box, CdfMode::ExactNormal);
  EXPECT_NEAR(mp.var, q.var, 1e-9 * q.var);
}

// Bin far in the tail: exact-normal either raises or stays inside; the
// logistic surrogate must return finite moments inside the bin and agree
// with quadrature of the logistic-kernel truncated density.
TEST(TruncatedMoments, FarTailBinLogisticSurrogateStaysFinite) {
  ComplexInterval iv{0.0, 0.5, -kInf, kInf};
  cplx mu(3.0, 0.0);
  double gamma = 50.0;
  try {
    fb::MomentPair mp = fb::truncated_complex_moments(mu, gamma, iv, CdfMode::ExactNormal);
    EXPECT_GT(mp.mean.real(), 0.0);
    EXPECT_LT(mp.mean.real(), 0.5);
  } catch (const fb::NonFiniteResult&) {
    // acceptable per the contract
  }
  fb::MomentPair mp = fb::truncated_complex_moments(mu, gamma, iv, CdfMode::LogisticSurrogate);
  ASSERT_TRUE(std::isfinite(mp.mean.real()) && std::isfinite(mp.var));
  EXPECT_GT(mp.mean.real(), 0.0);
  EXPECT_LT(mp.mean.real(), 0.5);
  fb::verify::QuadMoments q =
      fb::verify::quadrature_moments(mu, gamma, iv, CdfMode::LogisticSurrogate);
  EXPECT_NEAR(mp.mean.real(), q.mean_re, 1e-8);
  EXPECT_NEAR(mp.var, q.var, 1e-8 * q.var);
}

TEST(TruncatedMoments, ExactNormalRaisesOnUnderflowedBin) {
  ComplexInterval iv{0.0, 0.5, -kInf, kInf};
  EXPECT_THROW(
      fb::truncated_complex_moments(cplx(50.0, 0.0), 50.0, iv, CdfMode::ExactNormal),
      fb::NonFiniteResult);
}

TEST(TruncatedMoments, LogisticNeverFailsEvenInExtremeTails) {
  ComplexInterval iv{0.0, 1.0, -kInf, kInf};
  fb::MomentPair mp =
      fb::truncated_complex_moments(cplx(-2000.0, 0.0), 1e6, iv, CdfMode::LogisticSurrogate);
  ASSERT_TRUE(std::isfinite(mp.mean.real()));
  EXPECT_GT(mp.mean.real(), 0.0);
  EXPECT_LT(mp.mean.real(), 1.0);
  EXPECT_GE(mp.var, 0.0);
}

TEST(TruncatedMoments, MeanStrictlyInsideAndVarianceBounded) {
  fb::Rng gen(7);
  for (int n = 0; n < 2000; ++n) {
    double gamma = std::pow(10.0, -2.0 + 5.0 * gen.uniform());
    double sigma = 1.0 / std::sqrt(2.0 * gamma);
    cplx mu(2.0 * (gen.uniform() - 0.5), 2.0 * (gen.uniform() - 0.5));
    double w_re = sigma * (0.05 + 3.0 * gen.uniform());
    double w_im = sigma * (0.05 + 3.0 * gen.uniform());
    double o_re = mu.real() + sigma * 4.0 * (gen.uniform() - 0.5);
    double o_im = mu.imag() + sigma * 4.0 * (gen.uniform() - 0.5);
    ComplexInterval iv{o_re - w_re, o_re + w_re, o_im - w_im, o_im + w_im};
    for (CdfMode mode : {CdfMode::ExactNormal, CdfMode::LogisticSurrogate}) {
      fb::MomentPair mp = fb::truncated_complex_moments(mu, gamma, iv, mode);
      EXPECT_GT(mp.mean.real(), iv.lo_re);
      EXPECT_LT(mp.mean.real(), iv.up_re);
      EXPECT_GT(mp.mean.imag(), iv.lo_im);
      EXPECT_LT(mp.mean.imag(), iv.up_im);
      double width = std::max(iv.up_re - iv.lo_re, iv.up_im - iv.lo_im);
      EXPECT_LE(mp.var, 1.0 / gamma + width * width);
      EXPECT_GE(mp.var, 0.0);
    }
  }
}

TEST(TruncatedMoments, InfiniteDimensionMatchesUntruncatedComponent) {
  // Opening one dimension to the full axis reproduces the plain Gaussian
  // moments for that dimension, in both modes (mean = mu by symmetry).
  cplx mu(0.7, -1.3);
  double gamma = 2.5;
  ComplexInterval iv{-kInf, kInf, -0.5, 0.25};
  for (CdfMode mode : {CdfMode::ExactNormal, CdfMode::LogisticSurrogate}) {
    fb::MomentPair mp = fb::truncated_complex_moments(mu, gamma, iv, mode);
    EXPECT_DOUBLE_EQ(mp.mean.real(), mu.real());
    EXPECT_NE(mp.mean.imag(), mu.imag());
  }
}

TEST(TruncatedMoments, RejectsBadArguments) {
  ComplexInterval bad{1.0, 1.0, -1.0, 1.0};
  EXPECT_THROW(fb::truncated_complex_moments(cplx(0, 0), 1.0, bad, CdfMode::ExactNormal),
               std::invalid_argument);
  ComplexInterval ok;
  EXPECT_THROW(fb::truncated_complex_moments(cplx(0, 0), 0.0, ok, CdfMode::ExactNormal),
               std::invalid_argument);
  EXPECT_THROW(fb::truncated_complex_moments(cplx(0, 0), -1.0, ok, CdfMode::ExactNormal),
               std::invalid_argument);
}

// Randomized agreement against the independent Simpson oracle; the full-size
// battery (1e4 instances at 2^20 segments) runs in the acceptance suite.
TEST(TruncatedMoments, RandomizedQuadratureAgreement) {
  auto rep = fb::verify::moments_suite(400, 1e-6, 99, nullptr, 1 << 16);
  EXPECT_EQ(rep.failures, 0);
  EXPECT_EQ(rep.checks, 400);
}
