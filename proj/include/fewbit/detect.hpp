#pragma once

// Known-CSI detection. One coordinate-ascent engine drives all three
// algorithms: the matched-filter variant keeps a scalar noise precision that
// is re-estimated every sweep, the LMMSE variant keeps a full precision
// matrix, and the conventional baseline pins the scalar precision to 1/N0.
// Forcing the LMMSE algorithm onto the scalar model reproduces the
// matched-filter trajectories exactly; the reduction is structural.

#include <optional>
#include <vector>

#include "fewbit/constellation.hpp"
#include "fewbit/errors.hpp"
#include "fewbit/quadratic_form.hpp"
#include "fewbit/quantizer.hpp"
#include "fewbit/stat_kernels.hpp"
#include "fewbit/types.hpp"

namespace fewbit {

enum class DetectAlgo { MFQVB, LMMSEQVB, ConvQVB };

struct DetectorOptions {
  DetectAlgo algorithm = DetectAlgo::MFQVB;
  int max_iters = 50;
  CdfMode cdf_mode = CdfMode::LogisticSurrogate;
  double early_stop_tol = 0.0;  // 0 disables early stopping
  // Debug switch: run LMMSE-QVB on the scalar precision model (Gamma = gamma I).
  bool force_scalar_precision = false;
  // Keep per-user posterior pmfs current after every symbol update; the ELBO
  // diagnostic needs them, the plain detectors do not.
  bool track_posteriors = false;
};

struct CsirState {
  CVec r_mean;
  RVec r_var;
  CVec x_mean;
  RVec x_var;
  double gamma = 0.0;  // scalar precision (MF/conv)
  CMat Gamma;          // precision matrix (LMMSE); size 0 when unused
  CVec e;              // residual r_mean - H x_mean, maintained incrementally

  // Parameters of the variational factors at their last update; these define
  // the distributions the ELBO is evaluated over.
  bool r_factor_valid = false;
  CVec r_center;  // s_m
  RVec r_prec;    // per-antenna precision used for q(r_m)
  CVec z;         // per-user linear estimates
  RVec x_prec;    // per-user posterior precisions
  std::vector<DiscretePosterior> posteriors;
};

struct DetectionResult {
  std::vector<int> hard_idx;
  CVec hard;
  std::vector<DiscretePosterior> soft;
  int iters_run = 0;
  CsirState final_state;
};

namespace detail {

struct PosteriorStats {
  cplx mean{0.0, 0.0};
  double var = 0.0;
  double second = 0.0;
};

// Same arithmetic as discrete_posterior, minus the probability storage, so
// the hot loops stay allocation-free while producing bit-identical moments.
inline PosteriorStats posterior_stats(cplx z, double gamma, const Constellation& cons) {
  const auto& pts = cons.points();
  const auto& pri = cons.priors();
  const size_t n = pts.size();
  double expo_buf[64];
  double w_buf[64];
  std::vector<double> heap_e, heap_w;
  double* expo = expo_buf;
  double* w = w_buf;
  if (n > 64) {
    heap_e.resize(n);
    heap_w.resize(n);
    expo = heap_e.data();
    w = heap_w.data();
  }
  double emax = -kInf;
  for (size_t i = 0; i < n; ++i) {
    double e = -gamma * std::norm(z - pts[i]);
    if (!std::isfinite(e)) e = -std::numeric_limits<double>::max();
    expo[i] = e;
    if (e > emax) emax = e;
  }
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    w[i] = pri[i] * std::exp(expo[i] - emax);
    sum += w[i];
  }
  PosteriorStats st;
  double second = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double p = w[i] / sum;
    st.mean += p * pts[i];
    second += p * std::norm(pts[i]);
  }
  st.second = cons.constant_modulus() ? cons.constant_power() : second;
  st.var = st.second - std::norm(st.mean);
  if (st.var < 0.0) st.var = 0.0;
  return st;
}

}  // namespace detail

class CsirDetector {
 public:
  CsirDetector(const QuantizedBlock& obs, Eigen::Index col, const CMat& h,
               const Constellation& cons, DetectorOptions opts,
               std::optional<double> fixed_gamma = std::nullopt)
      : h_(h),
        cons_(cons),
        opts_(opts),
        fixed_gamma_(fixed_gamma),
        m_(h.rows()),
        k_(h.cols()) {
    matrix_mode_ = opts.algorithm == DetectAlgo::LMMSEQVB && !opts.force_scalar_precision &&
                   !fixed_gamma.has_value();
    bins_.reserve(m_);
    for (Eigen::Index r = 0; r < m_; ++r) bins_.push_back(obs.interval(r, col));

    h_norm2_.resize(k_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      h_norm2_[i] = h_.col(i).squaredNorm();
      if (!(h_norm2_[i] > 0.0)) throw ZeroColumn("detector: channel column has zero norm");
    }

    st_.r_mean = obs.values.col(col);
    st_.r_var = RVec::Zero(m_);
    st_.x_mean = CVec::Zero(k_);
    st_.x_var = RVec::Constant(k_, cons.prior_var());
    st_.e = st_.r_mean;  // r - H*0
    st_.gamma = fixed_gamma.value_or(0.0);
    st_.z = CVec::Zero(k_);
    st_.x_prec = RVec::Zero(k_);
    st_.posteriors.assign(k_, DiscretePosterior{cons.priors(), cons.prior_mean(),
                                                cons.prior_var(), cons.prior_second_moment()});
  }

  void update_precision() {
    if (fixed_gamma_.has_value()) return;  // conv-QVB keeps gamma = 1/N0
    if (matrix_mode_) {
      CMat a = (st_.e.squaredNorm() / double(m_)) * CMat::Identity(m_, m_);
      a += st_.r_var.cast<cplx>().asDiagonal();
      a += h_ * st_.x_var.cast<cplx>().asDiagonal() * h_.adjoint();
      Eigen::LLT<CMat> llt(a);
      if (llt.info() != Eigen::Success) {
        throw SingularCovariance("lmmse precision update: covariance not positive definite");
      }
      RVec ld = llt.matrixLLT().diagonal().real();
      double cmax = ld.maxCoeff(), cmin = ld.minCoeff();
      if (!(cmin > 0.0) || (cmax / cmin) * (cmax / cmin) > 1e14) {
        throw SingularCovariance("lmmse precision update: covariance numerically singular");
      }
      st_.Gamma = llt.solve(CMat::Identity(m_, m_));
      gh_ = st_.Gamma * h_;
      gq_.resize(k_);
      for (Eigen::Index i = 0; i < k_; ++i) gq_[i] = h_.col(i).dot(gh_.col(i)).real();
    } else {
      double denom = st_.e.squaredNorm() + st_.r_var.sum();
      for (Eigen::Index i = 0; i < k_; ++i) denom += st_.x_var[i] * h_norm2_[i];
      st_.gamma = denom > 0.0 ? double(m_) / denom : 1e12;
      if (st_.gamma > 1e12) st_.gamma = 1e12;
    }
  }

  void update_r() {
    if (matrix_mode_) {
      // Sequential per antenna; the residual entry is refreshed immediately.
      st_.r_center.resize(m_);
      st_.r_prec.resize(m_);
      for (Eigen::Index r = 0; r < m_; ++r) {
        double gmm = st_.Gamma(r, r).real();
        cplx s = st_.r_mean[r] - st_.Gamma.col(r).dot(st_.e) / gmm;
        MomentPair mp = truncated_complex_moments(s, gmm, bins_[r], opts_.cdf_mode);
        st_.e[r] += mp.mean - st_.r_mean[r];
        st_.r_mean[r] = mp.mean;
        st_.r_var[r] = mp.var;
        st_.r_center[r] = s;
        st_.r_prec[r] = gmm;
      }
    } else {
      CVec s = st_.r_mean - st_.e;  // = H <x>
      st_.r_center = s;
      st_.r_prec = RVec::Constant(m_, st_.gamma);
      for (Eigen::Index r = 0; r < m_; ++r) {
        MomentPair mp = truncated_complex_moments(s[r], st_.gamma, bins_[r], opts_.cdf_mode);
        st_.e[r] += mp.mean - st_.r_mean[r];
        st_.r_mean[r] = mp.mean;
        st_.r_var[r] = mp.var;
      }
    }
    st_.r_factor_valid = true;
  }

  void update_x_user(Eigen::Index i) {
    cplx z;
    double prec;
    if (matrix_mode_) {
      z = st_.x_mean[i] + gh_.col(i).dot(st_.e) / gq_[i];
      prec = gq_[i];
    } else {
      z = st_.x_mean[i] + h_.col(i).dot(st_.e) / h_norm2_[i];
      prec = st_.gamma * h_norm2_[i];
    }
    detail::PosteriorStats ps = detail::posterior_stats(z, prec, cons_);
    st_.e += h_.col(i) * (st_.x_mean[i] - ps.mean);
    st_.x_mean[i] = ps.mean;
    st_.x_var[i] = ps.var;
    st_.z[i] = z;
    st_.x_prec[i] = prec;
    if (opts_.track_posteriors) st_.posteriors[i] = discrete_posterior(z, prec, cons_);
  }

  void update_x() {
    for (Eigen::Index i = 0; i < k_; ++i) update_x_user(i);
  }

  // One sweep in the algorithm's listed order: precision, r block, x sweep.
  void iterate() {
    update_precision();
    update_r();
    update_x();
    ++iters_;
  }

  DetectionResult run() {
    CVec prev = st_.x_mean;
    for (int it = 0; it < opts_.max_iters; ++it) {
      iterate();
      if (opts_.early_stop_tol > 0.0 && it > 0) {
        double d = (st_.x_mean - prev).cwiseAbs().maxCoeff();
        if (d < opts_.early_stop_tol) break;
      }
      prev = st_.x_mean;
    }
    return finish();
  }

  DetectionResult finish() {
    DetectionResult res;
    res.iters_run = iters_;
    res.soft.reserve(k_);
    res.hard_idx.resize(k_);
    res.hard.resize(k_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      DiscretePosterior post = iters_ > 0 ? discrete_posterior(st_.z[i], st_.x_prec[i], cons_)
                                          : st_.posteriors[i];
      res.hard_idx[i] = post.argmax();
      res.hard[i] = cons_.points()[res.hard_idx[i]];
      res.soft.push_back(std::move(post));
    }
    st_.posteriors = res.soft;
    res.final_state = st_;
    return res;
  }

  const CsirState& state() const { return st_; }
  const std::vector<ComplexInterval>& bins() const { return bins_; }
  int iters() const { return iters_; }

 private:
  CMat h_;
  Constellation cons_;
  DetectorOptions opts_;
  std::optional<double> fixed_gamma_;
  Eigen::Index m_, k_;
  bool matrix_mode_ = false;
  std::vector<ComplexInterval> bins_;
  RVec h_norm2_;
  CMat gh_;                  // Gamma * H, refreshed with Gamma
  std::vector<double> gq_;   // h_i^H Gamma h_i
  CsirState st_;
  int iters_ = 0;
};

inline DetectionResult mf_qvb_detect(const QuantizedBlock& obs, Eigen::Index col, const CMat& h,
                                     const Constellation& cons, DetectorOptions opts = {}) {
  opts.algorithm = DetectAlgo::MFQVB;
  return CsirDetector(obs, col, h, cons, opts).run();
}

inline DetectionResult lmmse_qvb_detect(const QuantizedBlock& obs, Eigen::Index col,
                                        const CMat& h, const Constellation& cons,
                                        DetectorOptions opts = {}) {
  opts.algorithm = DetectAlgo::LMMSEQVB;
  return CsirDetector(obs, col, h, cons, opts).run();
}

inline DetectionResult conv_qvb_detect(const QuantizedBlock& obs, Eigen::Index col, const CMat& h,
                                       const Constellation& cons, double n0,
                                       DetectorOptions opts = {}) {
  if (!(n0 > 0.0)) throw std::invalid_argument("conv_qvb_detect: N0 must be positive");
  opts.algorithm = DetectAlgo::ConvQVB;
  return CsirDetector(obs, col, h, cons, opts, 1.0 / n0).run();
}

// ---- ELBO diagnostic ---------------------------------------------------------
//
// Closed-form ELBO of the scalar-precision model under exact-normal moments:
//   M ln(gamma/pi) - gamma <||r - Hx||^2> + sum_m H(q(r_m))
//   + sum_i [H(q(x_i)) + sum_a q_i(a) ln p_a].
// The observation factor contributes zero because q(r) is supported inside the
// bins. Point-mass factors (the initial state) contribute zero entropy, the
// limiting value.

namespace detail {

inline double truncated_normal_entropy_dim(double center, double prec, double lo, double up) {
  double s = std::sqrt(2.0 * prec);  // per-dimension sigma = 1/s
  double a = (lo == -kInf) ? -kInf : s * (lo - center);
  double b = (up == kInf) ? kInf : s * (up - center);
  double z = norm_cdf_diff(a, b);
  if (!(z > 0.0)) throw NonFiniteResult("elbo: truncated normal mass underflowed");
  double pa = norm_pdf(a), pb = norm_pdf(b);
  double apa = (pa == 0.0) ? 0.0 : a * pa;
  double bpb = (pb == 0.0) ? 0.0 : b * pb;
  double sigma2 = 1.0 / (2.0 * prec);
  return 0.5 * std::log(2.0 * std::numbers::pi * std::max(sigma2, 1e-300)) + 0.5 + std::log(z) +
         (apa - bpb) / (2.0 * z);
}

}  // namespace detail

inline double elbo(const CsirState& st, const QuantizedBlock& obs, Eigen::Index col,
                   const CMat& h, const Constellation& cons) {
  const Eigen::Index m = h.rows();
  const Eigen::Index k = h.cols();
  for (Eigen::Index r = 0; r < m; ++r) {
    ComplexInterval iv = obs.interval(r, col);
    cplx rm = st.r_mean[r];
    if (!(rm.real() >= iv.lo_re && rm.real() <= iv.up_re && rm.imag() >= iv.lo_im &&
          rm.imag() <= iv.up_im)) {
      throw InvalidState("elbo: r_mean outside its quantization bin");
    }
  }
  if (!(st.gamma > 0.0)) throw InvalidState("elbo: scalar precision not set");

  double q = expected_quadratic_form(st.r_mean, st.r_var.cast<cplx>().asDiagonal(), h, {},
                                     st.x_mean, st.x_var.cast<cplx>().asDiagonal(),
                                     CMat::Identity(m, m));
  double value = double(m) * std::log(st.gamma / std::numbers::pi) - st.gamma * q;

  if (st.r_factor_valid) {
    for (Eigen::Index r = 0; r < m; ++r) {
      ComplexInterval iv = obs.interval(r, col);
      value += detail::truncated_normal_entropy_dim(st.r_center[r].real(), st.r_prec[r],
                                                    iv.lo_re, iv.up_re);
      value += detail::truncated_normal_entropy_dim(st.r_center[r].imag(), st.r_prec[r],
                                                    iv.lo_im, iv.up_im);
    }
  }

  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& post = st.posteriors[i].probs;
    for (size_t a = 0; a < post.size(); ++a) {
      if (post[a] > 0.0) {
        value -= post[a] * std::log(post[a]);
        value += post[a] * std::log(std::max(cons.priors()[a], 1e-300));
      }
    }
  }
  return value;
}

}  // namespace fewbit
