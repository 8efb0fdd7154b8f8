#include "fewbit/constellation.hpp"

#include <gtest/gtest.h>

#include "fewbit/rng.hpp"

namespace fb = fewbit;
using fb::cplx;

TEST(Constellation, BuiltinsHaveUnitAverageEnergy) {
  for (const char* name : {"qpsk", "16qam", "8psk", "bpsk"}) {
    fb::Constellation c = fb::Constellation::by_name(name);
    double e = 0.0, psum = 0.0;
    for (size_t i = 0; i < c.size(); ++i) {
      e += c.priors()[i] * std::norm(c.points()[i]);
      psum += c.priors()[i];
    }
    EXPECT_NEAR(e, 1.0, 1e-12) << name;
    EXPECT_NEAR(psum, 1.0, 1e-12) << name;
  }
  EXPECT_TRUE(fb::Constellation::qpsk().constant_modulus());
  EXPECT_EQ(fb::Constellation::qpsk().constant_power(), 1.0);
  EXPECT_FALSE(fb::Constellation::qam16().constant_modulus());
}

TEST(Constellation, RejectsBadPriors) {
  std::vector<cplx> pts = {cplx(1, 0), cplx(-1, 0)};
  EXPECT_THROW(fb::Constellation(pts, {0.6, 0.6}), std::invalid_argument);
  EXPECT_THROW(fb::Constellation(pts, {1.2, -0.2}), std::invalid_argument);
  EXPECT_THROW(fb::Constellation(pts, {1.0}), std::invalid_argument);
}

TEST(DiscretePosterior, SymmetricObservationKeepsPrior) {
  fb::Constellation qpsk = fb::Constellation::qpsk();
  for (double gamma : {0.3, 1.0, 57.0}) {
    fb::DiscretePosterior p = fb::discrete_posterior(cplx(0, 0), gamma, qpsk);
    for (double q : p.probs) EXPECT_NEAR(q, 0.25, 1e-14);
    EXPECT_NEAR(std::abs(p.mean), 0.0, 1e-15);
    EXPECT_NEAR(p.var, 1.0, 1e-14);
  }
}

// Direct long-double evaluation of the posterior formula; the neighbor
// weight at z = 10 * a0 is 2 e^-20 per adjacent point, so the winning
// probability is 1 - ~4.1e-9 (not smaller).
TEST(DiscretePosterior, ConcentratesOnNearestPointAtHighConfidence) {
  fb::Constellation qpsk = fb::Constellation::qpsk();
  cplx target = qpsk.points()[0];
  cplx z = 10.0 * target;
  long double zsum = 0.0L;
  std::vector<long double> w(qpsk.size());
  for (size_t a = 0; a < qpsk.size(); ++a) {
    long double d = std::norm(z - qpsk.points()[a]);
    w[a] = 0.25L * std::exp((long double)(-(d - std::norm(z - target))));
    zsum += w[a];
  }
  double want = double(w[0] / zsum);
  fb::DiscretePosterior p = fb::discrete_posterior(z, 1.0, qpsk);
  EXPECT_NEAR(p.probs[0], want, 1e-12);
  EXPECT_GT(p.probs[0], 1.0 - 5e-9);
  EXPECT_LT(p.var, 1e-8);
  EXPECT_NEAR(std::abs(p.mean - target), 0.0, 1e-7);
}

TEST(DiscretePosterior, PskSecondMomentIsExactlyConstant) {
  fb::Constellation psk8 = fb::Constellation::psk(8);
  fb::Rng gen(3);
  for (int n = 0; n < 200; ++n) {
    cplx z(4.0 * (gen.uniform() - 0.5), 4.0 * (gen.uniform() - 0.5));
    double gamma = std::pow(10.0, 4.0 * gen.uniform() - 1.0);
    fb::DiscretePosterior p = fb::discrete_posterior(z, gamma, psk8);
    EXPECT_EQ(p.second_moment, 1.0);
    EXPECT_NEAR(p.second_moment, std::norm(p.mean) + p.var, 1e-10);
  }
}

TEST(DiscretePosterior, SecondMomentIdentityForQam) {
  fb::Constellation qam = fb::Constellation::qam16();
  fb::Rng gen(4);
  for (int n = 0; n < 200; ++n) {
    cplx z(3.0 * (gen.uniform() - 0.5), 3.0 * (gen.uniform() - 0.5));
    double gamma = std::pow(10.0, 3.0 * gen.uniform() - 1.0);
    fb::DiscretePosterior p = fb::discrete_posterior(z, gamma, qam);
    EXPECT_NEAR(p.second_moment, std::norm(p.mean) + p.var, 1e-10);
    double psum = 0.0;
    for (double q : p.probs) psum += q;
    EXPECT_NEAR(psum, 1.0, 1e-12);
  }
}

// Max-subtraction correctness: adding a common constant to every |z - a|^2
// must leave the posterior unchanged bit for bit. With a purely real
// constellation, moving the imaginary part of z adds exactly (y2^2 - y1^2)
// to every squared distance; dyadic coordinates and power-of-two gamma keep
// the whole exponent computation exact, so the test is genuinely bitwise.
TEST(DiscretePosterior, ExponentShiftInvarianceBitForBit) {
  std::vector<cplx> pts = {cplx(-3, 0), cplx(-1, 0), cplx(1, 0), cplx(3, 0)};
  fb::Constellation cons(pts, std::vector<double>(4, 0.25));
  fb::Rng gen(11);
  for (int n = 0; n < 500; ++n) {
    double x = std::ldexp(double(int(gen.uniform() * 129) - 64), -4);
    double y1 = std::ldexp(double(int(gen.uniform() * 64)), -4);
    double y2 = std::ldexp(double(int(gen.uniform() * 64)), -4);
    double gamma = std::ldexp(1.0, int(gen.uniform() * 7) - 2);
    fb::DiscretePosterior a = fb::discrete_posterior(cplx(x, y1), gamma, cons);
    fb::DiscretePosterior b = fb::discrete_posterior(cplx(x, y2), gamma, cons);
    ASSERT_EQ(a.probs.size(), b.probs.size());
    for (size_t i = 0; i < a.probs.size(); ++i) {
      EXPECT_EQ(a.probs[i], b.probs[i]) << "x=" << x << " y1=" << y1 << " y2=" << y2;
    }
  }
}
