#pragma once

// Scalar special functions shared by the statistical kernels. Everything here
// is branch-careful around IEEE infinities because quantization bins use
// +/-inf bounds for the outermost bins.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace fewbit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

// Shape of the logistic surrogate CDF, fixed by the algorithm definition.
inline const double kLogisticShape = 3.0 / std::sqrt(std::numbers::pi);

inline double norm_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) * 0.3989422804014326779399461;  // 1/sqrt(2*pi)
}

inline double norm_cdf(double x) {
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

// Phi(b) - Phi(a) for a < b, evaluated in whichever tail keeps the erfc
// arguments positive so the difference of like-sized terms stays accurate.
inline double norm_cdf_diff(double a, double b) {
  if (a >= 0.0) {
    double ea = (a == kInf) ? 0.0 : std::erfc(a * kInvSqrt2);
    double eb = (b == kInf) ? 0.0 : std::erfc(b * kInvSqrt2);
    return 0.5 * (ea - eb);
  }
  if (b <= 0.0) {
    double ea = (a == -kInf) ? 0.0 : std::erfc(-a * kInvSqrt2);
    double eb = (b == -kInf) ? 0.0 : std::erfc(-b * kInvSqrt2);
    return 0.5 * (eb - ea);
  }
  // Interval straddles zero; plain erf difference has no cancellation here.
  double fa = (a == -kInf) ? -1.0 : std::erf(a * kInvSqrt2);
  double fb = (b == kInf) ? 1.0 : std::erf(b * kInvSqrt2);
  return 0.5 * (fb - fa);
}

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

namespace detail {

// Maclaurin series of the dilogarithm, valid for |x| <= 1/2.
inline double dilog_series(double x) {
  double term = x, sum = x;
  for (int k = 2; k < 60; ++k) {
    term *= x;
    double add = term / (double(k) * double(k));
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Li2(x) for x in [-1, 0].
inline double dilog_unit(double x) {
  if (x >= -0.5) return dilog_series(x);
  // Landen transformation maps [-1,-0.5] into (0, 1/3].
  double y = x / (x - 1.0);
  double l = std::log1p(-x);
  return -dilog_series(y) - 0.5 * l * l;
}

}  // namespace detail

// Li2(-exp(v)), taken through the log-argument so v may be arbitrarily large.
inline double dilog_neg_exp(double v) {
  constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  if (v > 0.0) {
    // Inversion formula Li2(z) = -pi^2/6 - ln^2(-z)/2 - Li2(1/z) for z < -1.
    return -pi2_6 - 0.5 * v * v - dilog_neg_exp(-v);
  }
  if (v < -700.0) {
    // Li2(-e^v) = -e^v + e^{2v}/4 - ...; below exp underflow it is -e^v exactly.
    return -std::exp(v);
  }
  return detail::dilog_unit(-std::exp(v));
}

// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n.
template <int N>
struct GaussLegendre {
  std::array<double, N> node{};
  std::array<double, N> weight{};

  GaussLegendre() {
    for (int i = 0; i < (N + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      node[i] = -x;
      node[N - 1 - i] = x;
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weight[i] = w;
      weight[N - 1 - i] = w;
    }
  }
};

inline const GaussLegendre<48>& gl48() {
  static const GaussLegendre<48> rule;
  return rule;
}

}  // namespace fewbit
