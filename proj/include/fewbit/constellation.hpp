#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fewbit/errors.hpp"
#include "fewbit/special.hpp"
#include "fewbit/types.hpp"

namespace fewbit {

// Finite symbol alphabet with prior probabilities. Built-in alphabets are
// normalized to unit average energy. For constant-modulus alphabets the
// common symbol power is recorded analytically so posterior second moments
// can be held exact (they never depend on the observation for PSK).
class Constellation {
 public:
  Constellation(std::vector<cplx> points, std::vector<double> priors, std::string name = "custom")
      : points_(std::move(points)), priors_(std::move(priors)), name_(std::move(name)) {
    if (points_.empty() || points_.size() != priors_.size()) {
      throw std::invalid_argument("constellation: points/priors size mismatch");
    }
    double sum = 0.0;
    for (double p : priors_) {
      if (!(p >= 0.0)) throw std::invalid_argument("constellation: negative prior");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("constellation: priors must sum to 1");
    }
    detect_constant_power();
    cplx m = 0.0;
    double e2 = 0.0;
    for (size_t i = 0; i < points_.size(); ++i) {
      m += priors_[i] * points_[i];
      e2 += priors_[i] * std::norm(points_[i]);
    }
    prior_mean_ = m;
    prior_second_ = has_constant_power_ ? constant_power_ : e2;
    prior_var_ = prior_second_ - std::norm(prior_mean_);
  }

  static Constellation qpsk() {
    double s = 1.0 / std::sqrt(2.0);
    Constellation c({{s, s}, {s, -s}, {-s, s}, {-s, -s}},
                    std::vector<double>(4, 0.25), "qpsk");
    c.set_constant_power(1.0);
    return c;
  }

  static Constellation psk(int n) {
    std::vector<cplx> pts(n);
    for (int k = 0; k < n; ++k) {
      double phi = 2.0 * std::numbers::pi * k / n;
      pts[k] = cplx(std::cos(phi), std::sin(phi));
    }
    Constellation c(std::move(pts), std::vector<double>(n, 1.0 / n), std::to_string(n) + "psk");
    c.set_constant_power(1.0);
    return c;
  }

  static Constellation qam16() {
    double s = 1.0 / std::sqrt(10.0);
    std::vector<cplx> pts;
    for (int a : {-3, -1, 1, 3}) {
      for (int b : {-3, -1, 1, 3}) pts.emplace_back(a * s, b * s);
    }
    return Constellation(std::move(pts), std::vector<double>(16, 1.0 / 16.0), "16qam");
  }

  static Constellation by_name(const std::string& name) {
    if (name == "qpsk") return qpsk();
    if (name == "16qam") return qam16();
    if (name == "bpsk") return psk(2);
    if (name == "8psk") return psk(8);
    throw std::invalid_argument("unknown constellation: " + name);
  }

  size_t size() const { return points_.size(); }
  const std::vector<cplx>& points() const { return points_; }
  const std::vector<double>& priors() const { return priors_; }
  const std::string& name() const { return name_; }
  cplx prior_mean() const { return prior_mean_; }
  double prior_var() const { return prior_var_; }
  double prior_second_moment() const { return prior_second_; }
  bool constant_modulus() const { return has_constant_power_; }
  double constant_power() const { return constant_power_; }

 private:
  void set_constant_power(double p) {
    has_constant_power_ = true;
    constant_power_ = p;
    prior_second_ = p;
    prior_var_ = p - std::norm(prior_mean_);
  }

  void detect_constant_power() {
    double p0 = std::norm(points_[0]);
    for (const cplx& a : points_) {
      if (std::abs(std::norm(a) - p0) > 1e-12 * std::max(1.0, p0)) return;
    }
    has_constant_power_ = true;
    constant_power_ = p0;
  }

  std::vector<cplx> points_;
  std::vector<double> priors_;
  std::string name_;
  cplx prior_mean_{0.0, 0.0};
  double prior_var_ = 0.0;
  double prior_second_ = 0.0;
  bool has_constant_power_ = false;
  double constant_power_ = 0.0;
};

struct DiscretePosterior {
  std::vector<double> probs;
  cplx mean{0.0, 0.0};
  double var = 0.0;
  double second_moment = 0.0;

  // Lowest index wins ties, which keeps hard decisions deterministic.
  int argmax() const {
    int best = 0;
    for (size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = static_cast<int>(i);
    }
    return best;
  }
};

// Posterior of a symbol observed through z = x + CN(0, 1/gamma).
// probs[a] ~ p_a * exp(-gamma |z-a|^2), normalized after subtracting the
// largest exponent; gamma |z-a|^2 can exceed 700 at high SNR.
inline DiscretePosterior discrete_posterior(cplx z, double gamma, const Constellation& cons) {
  if (!(gamma >= 0.0) || std::isnan(gamma)) {
    throw std::invalid_argument("discrete_posterior: gamma must be nonnegative");
  }
  const auto& pts = cons.points();
  const auto& pri = cons.priors();
  size_t n = pts.size();
  std::vector<double> expo(n);
  double emax = -kInf;
  for (size_t i = 0; i < n; ++i) {
    double e = -gamma * std::norm(z - pts[i]);
    if (!std::isfinite(e)) e = -std::numeric_limits<double>::max();
    expo[i] = e;
    if (e > emax) emax = e;
  }
  DiscretePosterior out;
  out.probs.resize(n);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double w = pri[i] * std::exp(expo[i] - emax);
    out.probs[i] = w;
    sum += w;
  }
  double second = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out.probs[i] /= sum;
    out.mean += out.probs[i] * pts[i];
    second += out.probs[i] * std::norm(pts[i]);
  }
  out.second_moment = cons.constant_modulus() ? cons.constant_power() : second;
  out.var = out.second_moment - std::norm(out.mean);
  if (out.var < 0.0) out.var = 0.0;
  return out;
}

}  // namespace fewbit
