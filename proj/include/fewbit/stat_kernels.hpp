#pragma once

// Truncated complex-normal moments, the scalar kernel every VB update runs
// through. Two CDF models are supported: the exact normal, which can
// legitimately underflow when the bin sits many sigmas from the mean, and a
// logistic kernel whose heavier tails keep every regime finite. For the
// logistic model we evaluate the moments of the truncated logistic density in
// closed form (the dilogarithm shows up in the second moment) so that both
// modes agree with direct quadrature of their kernel to full precision.

#include <cmath>
#include <limits>

#include "fewbit/errors.hpp"
#include "fewbit/special.hpp"
#include "fewbit/types.hpp"

namespace fewbit {

enum class CdfMode { ExactNormal, LogisticSurrogate };

// One quantization bin: per-dimension open/closed bounds, -inf/+inf allowed.
struct ComplexInterval {
  double lo_re = -kInf;
  double up_re = kInf;
  double lo_im = -kInf;
  double up_im = kInf;

  bool valid() const {
    return lo_re < up_re && lo_im < up_im && !std::isnan(lo_re) && !std::isnan(up_re) &&
           !std::isnan(lo_im) && !std::isnan(up_im);
  }
};

struct MomentPair {
  cplx mean;
  double var = 0.0;  // var_re + var_im
};

namespace kernels {

struct StdMoments {
  double mean;
  double var;
};

// Logistic kernel variance pi^2/(3 c^2) for shape c.
inline double logistic_variance() {
  double c = kLogisticShape;
  return std::numbers::pi * std::numbers::pi / (3.0 * c * c);
}

// ---- shared narrow-interval path -------------------------------------------
//
// For standardized bins narrower than ~0.1 the closed forms lose digits to
// cancellation, so we integrate the kernel directly. Centering at the bin
// midpoint keeps every accumulated quantity O(width), and factoring out the
// midpoint density makes the ratios immune to tail underflow.

template <typename LogKernel>
StdMoments narrow_by_quadrature(double a, double b, LogKernel&& logk) {
  const auto& gl = gl48();
  double t0 = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double l0 = logk(t0);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < 48; ++j) {
    double u = gl.node[j];
    double g = gl.weight[j] * std::exp(logk(t0 + h * u) - l0);
    s0 += g;
    s1 += g * u;
    s2 += g * u * u;
  }
  double r1 = s1 / s0;
  double r2 = s2 / s0;
  double var = h * h * (r2 - r1 * r1);
  return {t0 + h * r1, var < 0.0 ? 0.0 : var};
}

// ---- exact normal kernel ----------------------------------------------------

inline StdMoments std_trunc_normal_oriented(double a, double b) {
  double z = norm_cdf_diff(a, b);
  if (!(z >= std::numeric_limits<double>::min())) {
    throw NonFiniteResult("normal CDF mass of quantization bin underflowed to zero");
  }
  if (b - a <= 0.1) {
    return narrow_by_quadrature(a, b, [](double t) { return -0.5 * t * t; });
  }
  double pa = norm_pdf(a);
  double pb = norm_pdf(b);
  double apa = (pa == 0.0) ? 0.0 : a * pa;
  double bpb = (pb == 0.0) ? 0.0 : b * pb;
  double m1 = (pa - pb) / z;
  double var = 1.0 + (apa - bpb) / z - m1 * m1;
  return {m1, var < 0.0 ? 0.0 : var};
}

// ---- logistic kernel --------------------------------------------------------

// Antiderivative of t*p(t); tends to 0 at both infinities.
inline double logistic_t_primitive(double t) {
  double c = kLogisticShape;
  if (t == -kInf || t == kInf) return 0.0;
  if (t <= 0.0) return t * sigmoid(c * t) - std::log1p(std::exp(c * t)) / c;
  return -t * sigmoid(-c * t) - std::log1p(std::exp(-c * t)) / c;
}

// Antiderivative of t^2*p(t); 0 at -inf, pi^2/(3c^2) at +inf.
inline double logistic_t2_primitive(double t) {
  double c = kLogisticShape;
  if (t == -kInf) return 0.0;
  if (t == kInf) return logistic_variance();
  if (t <= 0.0) {
    return t * t * sigmoid(c * t) - (2.0 * t / c) * std::log1p(std::exp(c * t)) -
           (2.0 / (c * c)) * dilog_neg_exp(c * t);
  }
  return logistic_variance() - t * t * sigmoid(-c * t) -
         (2.0 * t / c) * std::log1p(std::exp(-c * t)) +
         (2.0 / (c * c)) * dilog_neg_exp(-c * t);
}

inline StdMoments std_trunc_logistic_oriented(double a, double b) {
  double c = kLogisticShape;
  if (b <= -30.0) {
    // Deep left tail: the kernel is an exponential e^{ct} to relative accuracy
    // e^{cb} < 1e-21, so use the moments of a truncated exponential, centered
    // at b to avoid large-magnitude cancellation. w = 0 covers both a = -inf
    // and underflow of e^{c(a-b)}; the w-terms must not be formed then
    // (inf * 0).
    double d = a - b;  // in [-inf, 0)
    double w = (d == -kInf) ? 0.0 : std::exp(c * d);
    double es, es2;
    if (w == 0.0) {
      es = -1.0 / c;
      es2 = 2.0 / (c * c);
    } else {
      es = (-1.0 / c - (d - 1.0 / c) * w) / (1.0 - w);
      es2 = (2.0 / (c * c) - w * (d * d - 2.0 * d / c + 2.0 / (c * c))) / (1.0 - w);
    }
    double var = es2 - es * es;
    return {b + es, var < 0.0 ? 0.0 : var};
  }
  if (b - a <= 0.1) {
    return narrow_by_quadrature(
        a, b, [c](double t) { return -softplus(c * t) - softplus(-c * t); });
  }
  double fa = (a == -kInf) ? 0.0 : sigmoid(c * a);
  double z = sigmoid(c * b) - fa;
  double m1 = (logistic_t_primitive(b) - logistic_t_primitive(a)) / z;
  double m2 = (logistic_t2_primitive(b) - logistic_t2_primitive(a)) / z;
  double var = m2 - m1 * m1;
  return {m1, var < 0.0 ? 0.0 : var};
}

// Dispatch with reflection so downstream branches only see intervals whose
// midpoint is non-positive (deep-tail handling is then one-sided).
inline StdMoments std_trunc_moments(double a, double b, CdfMode mode) {
  if (a == -kInf && b == kInf) {
    return {0.0, mode == CdfMode::ExactNormal ? 1.0 : logistic_variance()};
  }
  bool reflect = (b == kInf) || (a != -kInf && a + b > 0.0);
  double lo = reflect ? -b : a;
  double hi = reflect ? -a : b;
  StdMoments m = (mode == CdfMode::ExactNormal) ? std_trunc_normal_oriented(lo, hi)
                                                : std_trunc_logistic_oriented(lo, hi);
  if (reflect) m.mean = -m.mean;
  return m;
}

}  // namespace kernels

// Mean and variance of CN(mu, 1/gamma) truncated, per real dimension, to the
// given bin. var is the sum of the real- and imaginary-part variances.
inline MomentPair truncated_complex_moments(cplx mu, double gamma, const ComplexInterval& iv,
                                            CdfMode mode) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("truncated_complex_moments: gamma must be positive finite");
  }
  if (!iv.valid()) {
    throw std::invalid_argument("truncated_complex_moments: invalid interval");
  }
  double s = std::sqrt(2.0 * gamma);
  auto standardize = [s](double bound, double center) {
    if (bound == -kInf || bound == kInf) return bound;
    return s * (bound - center);
  };
  kernels::StdMoments re = kernels::std_trunc_moments(standardize(iv.lo_re, mu.real()),
                                                      standardize(iv.up_re, mu.real()), mode);
  kernels::StdMoments im = kernels::std_trunc_moments(standardize(iv.lo_im, mu.imag()),
                                                      standardize(iv.up_im, mu.imag()), mode);
  MomentPair out;
  out.mean = cplx(mu.real() + re.mean / s, mu.imag() + im.mean / s);
  out.var = (re.var + im.var) / (2.0 * gamma);
  return out;
}

}  // namespace fewbit
