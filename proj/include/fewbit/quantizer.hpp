#pragma once

// b-bit uniform scalar quantizer, applied independently to real and imaginary
// parts. Besides the quantized value, the VB algorithms consume the bin each
// sample fell into, so the block output carries per-sample interval bounds.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fewbit/errors.hpp"
#include "fewbit/stat_kernels.hpp"
#include "fewbit/types.hpp"

namespace fewbit {

struct QuantizerSpec {
  int bits = 0;
  double step = 0.0;
  std::vector<double> thresholds;  // d_k = (-2^{b-1} + k) * step, k = 1 .. 2^b - 1
};

inline QuantizerSpec build_quantizer(int bits, double step) {
  if (bits < 1 || bits > 12) throw InvalidBits("build_quantizer: bits must be in [1, 12]");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidStep("build_quantizer: step must be positive");
  QuantizerSpec spec;
  spec.bits = bits;
  spec.step = step;
  const int levels = 1 << bits;
  spec.thresholds.resize(levels - 1);
  for (int k = 1; k < levels; ++k) {
    spec.thresholds[k - 1] = (-(double)(levels / 2) + k) * step;
  }
  return spec;
}

struct QuantizedBlock {
  CMat values;
  RMat lo_re, up_re, lo_im, up_im;

  ComplexInterval interval(Eigen::Index r, Eigen::Index c) const {
    return {lo_re(r, c), up_re(r, c), lo_im(r, c), up_im(r, c)};
  }
};

namespace detail {

struct QuantizedScalar {
  double value, lo, up;
};

// Bins are right-closed: x in (d_{k-1}, d_k] maps to level k. Values exactly
// on a threshold therefore fall in the bin below, bit-exactly against the
// stored threshold array.
inline QuantizedScalar quantize_real(double x, const QuantizerSpec& spec) {
  const auto& th = spec.thresholds;
  auto it = std::lower_bound(th.begin(), th.end(), x);
  if (it == th.end()) {
    double top = ((1 << spec.bits) - 1) * spec.step / 2.0;
    return {top, th.back(), kInf};
  }
  double up = *it;
  double lo = (it == th.begin()) ? -kInf : *(it - 1);
  return {up - spec.step / 2.0, lo, up};
}

}  // namespace detail

inline QuantizedBlock quantize(const CMat& r, const QuantizerSpec& spec) {
  QuantizedBlock out;
  out.values.resize(r.rows(), r.cols());
  out.lo_re.resize(r.rows(), r.cols());
  out.up_re.resize(r.rows(), r.cols());
  out.lo_im.resize(r.rows(), r.cols());
  out.up_im.resize(r.rows(), r.cols());
  for (Eigen::Index c = 0; c < r.cols(); ++c) {
    for (Eigen::Index m = 0; m < r.rows(); ++m) {
      auto re = detail::quantize_real(r(m, c).real(), spec);
      auto im = detail::quantize_real(r(m, c).imag(), spec);
      out.values(m, c) = cplx(re.value, im.value);
      out.lo_re(m, c) = re.lo;
      out.up_re(m, c) = re.up;
      out.lo_im(m, c) = im.lo;
      out.up_im(m, c) = im.up;
    }
  }
  return out;
}

// MSE-optimal uniform step for a unit-variance real Gaussian, per bit depth.
// 1..5 are the classic Lloyd-Max values; 6..12 were obtained by direct MSE
// minimization of the midpoint quantizer (the clip point has to keep growing
// with b, a plain step-halving extension saturates near 2% rms error).
inline double calibrate_step_size(double rx_power, int bits) {
  static const double kappa[12] = {1.596,    0.996,    0.586,    0.335,   0.188,    0.104063,
                                   0.056868, 0.030762, 0.016499, 0.008785, 0.004650, 0.002448};
  if (bits < 1 || bits > 12) throw InvalidBits("calibrate_step_size: bits must be in [1, 12]");
  if (!(rx_power > 0.0)) throw std::invalid_argument("calibrate_step_size: rx_power must be positive");
  return kappa[bits - 1] * std::sqrt(rx_power / 2.0);
}

}  // namespace fewbit
