#include "fewbit/quadratic_form.hpp"

#include <gtest/gtest.h>

#include "fewbit/rng.hpp"
#include "fewbit/verify.hpp"

namespace fb = fewbit;
using fb::CMat;
using fb::CVec;
using fb::cplx;

TEST(ExpectedQuadraticForm, DeterministicReducesToResidualNorm) {
  fb::Rng gen(31);
  int m = 3, n = 2;
  CVec y(m), x(n);
  CMat a(m, n);
  for (int i = 0; i < m; ++i) y[i] = gen.cgaussian(1.0);
  for (int i = 0; i < n; ++i) x[i] = gen.cgaussian(1.0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = gen.cgaussian(1.0);
  }
  double got = fb::expected_quadratic_form(y, CMat::Zero(m, m), a, {}, x, CMat::Zero(n, n),
                                           CMat::Identity(m, m));
  EXPECT_NEAR(got, (y - a * x).squaredNorm(), 1e-12);
}

TEST(ExpectedQuadraticForm, PureNoiseTerm) {
  int m = 2;
  double got = fb::expected_quadratic_form(CVec::Zero(m), CMat::Identity(m, m), CMat::Zero(m, 1),
                                           {CMat::Zero(m, m)}, CVec::Zero(1), CMat::Zero(1, 1),
                                           CMat::Identity(m, m));
  EXPECT_NEAR(got, 2.0, 1e-14);
}

// Specialization used by the scalar-precision noise update:
// B = I, deterministic A: ||<y> - A<x>||^2 + Tr{Sigma_y} + Tr{Sigma_x A^H A}.
TEST(ExpectedQuadraticForm, ScalarPrecisionDenominatorForm) {
  fb::Rng gen(32);
  int m = 4, n = 3;
  CVec y(m), x(n);
  CMat a(m, n);
  for (int i = 0; i < m; ++i) y[i] = gen.cgaussian(1.0);
  for (int i = 0; i < n; ++i) x[i] = gen.cgaussian(1.0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = gen.cgaussian(1.0);
  }
  fb::RVec tau_y(m), tau_x(n);
  for (int i = 0; i < m; ++i) tau_y[i] = gen.uniform();
  for (int i = 0; i < n; ++i) tau_x[i] = gen.uniform();

  double got = fb::expected_quadratic_form(y, tau_y.cast<cplx>().asDiagonal(), a, {}, x,
                                           tau_x.cast<cplx>().asDiagonal(),
                                           CMat::Identity(m, m));
  double want = (y - a * x).squaredNorm() + tau_y.sum();
  for (int i = 0; i < n; ++i) want += tau_x[i] * a.col(i).squaredNorm();
  EXPECT_NEAR(got, want, 1e-10 * std::abs(want));
}

// Indefinite Hermitian B with deterministic y, A, x: the five-term expansion
// collapses to the plain quadratic form exactly.
TEST(ExpectedQuadraticForm, IndefiniteHermitianDeterministicReduction) {
  fb::Rng gen(33);
  int m = 4, n = 2;
  CVec y(m), x(n);
  CMat a(m, n), g(m, m);
  for (int i = 0; i < m; ++i) y[i] = gen.cgaussian(1.0);
  for (int i = 0; i < n; ++i) x[i] = gen.cgaussian(1.0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = gen.cgaussian(1.0);
    for (int c = 0; c < m; ++c) g(r, c) = gen.cgaussian(1.0);
  }
  CMat b = 0.5 * (g + g.adjoint());  // indefinite in general
  double got = fb::expected_quadratic_form(y, CMat::Zero(m, m), a, {}, x, CMat::Zero(n, n), b);
  CVec resid = y - a * x;
  EXPECT_NEAR(got, resid.dot(b * resid).real(), 1e-12);
}

TEST(ExpectedQuadraticForm, DimensionChecks) {
  EXPECT_THROW(fb::expected_quadratic_form(CVec::Zero(2), CMat::Zero(2, 2), CMat::Zero(3, 1), {},
                                           CVec::Zero(1), CMat::Zero(1, 1), CMat::Identity(2, 2)),
               fb::DimensionMismatch);
  EXPECT_THROW(fb::expected_quadratic_form(CVec::Zero(2), CMat::Zero(2, 2), CMat::Zero(2, 1),
                                           {CMat::Zero(3, 3)}, CVec::Zero(1), CMat::Zero(1, 1),
                                           CMat::Identity(2, 2)),
               fb::DimensionMismatch);
}

// Small Monte Carlo cross-check; the full 100-instance battery at 1e6
// samples is acceptance criterion 2.
TEST(ExpectedQuadraticForm, MonteCarloAgreement) {
  auto rep = fb::verify::theorem1_suite(8, 200000, 0.03, 77, nullptr);
  EXPECT_EQ(rep.failures, 0);
}
