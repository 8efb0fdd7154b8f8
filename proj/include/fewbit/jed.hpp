#pragma once

// Joint channel estimation and data detection. As with known-CSI detection,
// one engine drives the matched-filter, LMMSE, and conventional (fixed 1/N0)
// variants. Per-slot noise precisions are scalars for the matched-filter
// family and matrices for the LMMSE family; "lite" shares one precision
// across all data slots, which is the default for LMMSE where it saves T_d
// matrix inversions per sweep.
//
// The per-user channel posterior is Gaussian with
//   Sigma_i = (gamma_i I + C_i^{-1})^{-1},  <h_i> = Sigma_i * (gamma_i k_i),
// and gamma_i k_i is accumulated from the running residual matrices, never
// from the full sums over slots. For the scalar-precision family Sigma_i is
// evaluated in the eigenbasis of C_i, which costs one decomposition per solve,
// needs no explicit C_i^{-1}, and is exact for semidefinite C_i.

#include <optional>
#include <vector>

#include "fewbit/constellation.hpp"
#include "fewbit/detect.hpp"
#include "fewbit/errors.hpp"
#include "fewbit/quantizer.hpp"
#include "fewbit/stat_kernels.hpp"
#include "fewbit/types.hpp"

namespace fewbit {

enum class JedAlgo { MFJED, LMMSEJED, ConvJED };

struct JedOptions {
  JedAlgo algorithm = JedAlgo::MFJED;
  std::optional<bool> lite;  // defaults to true for LMMSE-JED, false otherwise
  int max_iters = 50;
  CdfMode cdf_mode = CdfMode::LogisticSurrogate;
  // Debug switch: run LMMSE-JED with Gamma_t = gamma_dt I, i.e. on the scalar
  // precision model, which reduces it to MF-JED structurally.
  bool force_scalar_precision = false;

  bool lite_resolved() const { return lite.value_or(algorithm == JedAlgo::LMMSEJED); }
};

struct JedState {
  CMat Rp_mean;
  RMat Rp_var;
  CMat Rd_mean;
  RMat Rd_var;
  CMat H_mean;
  RVec h_trace;  // Tr{Sigma_{h_i}}
  CMat Xd_mean;
  RMat Xd_var;
  RMat Xd_second;  // <|x_{d,it}|^2>; held constant for constant-modulus alphabets
  double gamma_p = 0.0;
  RVec gamma_d;               // per-slot scalar precisions (MF/conv; equal entries in lite)
  CMat Gamma;                 // pooled precision matrix (LMMSE lite)
  std::vector<CMat> Gamma_t;  // per-slot precision matrices (LMMSE full)
  CMat Ep, Ed;                // residuals Rp_mean - H_mean Xp, Rd_mean - H_mean Xd_mean
  CMat Z;                     // per-(i,t) linear symbol estimates from the last sweep
  RMat Zprec;                 // matching posterior precisions
};

struct JedResult {
  CMat H_hat;
  CMat Xd_hat;
  Eigen::MatrixXi Xd_idx;
  std::vector<std::vector<DiscretePosterior>> soft;  // soft[i][t]
  int iters_run = 0;
  JedState final_state;
};

namespace detail {

// Prior factorization of one user's channel covariance, specialized so the
// common cases never touch a dense solver.
struct ChannelPrior {
  enum class Kind { Identity, Diagonal, Dense } kind = Kind::Identity;
  Eigen::Index m = 0;
  RVec diag;  // Diagonal: C's diagonal; Dense: eigenvalues of C
  CMat u;     // Dense: eigenvectors
  CMat cinv;  // explicit inverse (ridged when near-singular); LMMSE path only
  double prior_trace = 0.0;

  static ChannelPrior build(const CMat& c, bool need_inverse) {
    ChannelPrior p;
    p.m = c.rows();
    p.prior_trace = c.trace().real();
    double offdiag = (c - CMat(c.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    if (offdiag == 0.0) {
      bool unit = (c.diagonal().real().array() == 1.0).all() && c.diagonal().imag().isZero(0.0);
      p.kind = unit ? Kind::Identity : Kind::Diagonal;
      p.diag = c.diagonal().real();
    } else {
      p.kind = Kind::Dense;
      Eigen::SelfAdjointEigenSolver<CMat> eig(c);
      p.diag = eig.eigenvalues().cwiseMax(0.0);
      p.u = eig.eigenvectors();
    }
    if (need_inverse) {
      if (p.kind == Kind::Dense) {
        RVec lam = p.diag;
        double lmax = lam.maxCoeff();
        if (lam.minCoeff() <= lmax / 1e12) lam.array() += 1e-10;
        p.cinv = p.u * lam.cwiseInverse().asDiagonal() * p.u.adjoint();
      } else {
        RVec d = p.diag.size() ? p.diag : RVec::Ones(p.m);
        if (p.kind == Kind::Identity) d = RVec::Ones(p.m);
        if (d.minCoeff() <= d.maxCoeff() / 1e12) d.array() += 1e-10;
        p.cinv = d.cwiseInverse().cast<cplx>().asDiagonal();
      }
    }
    return p;
  }

  // Sigma = (gamma I + C^{-1})^{-1} applied to a vector, plus its trace.
  // In each representation Sigma acts through d/(gamma d + 1) on the prior
  // spectrum, which is the exact limit for zero eigenvalues.
  double trace(double gamma) const {
    if (kind == Kind::Identity) return double(m) / (gamma + 1.0);
    double t = 0.0;
    for (Eigen::Index j = 0; j < diag.size(); ++j) t += diag[j] / (gamma * diag[j] + 1.0);
    return t;
  }

  CVec apply(double gamma, const CVec& v) const {
    if (kind == Kind::Identity) return v / (gamma + 1.0);
    if (kind == Kind::Diagonal) {
      return (diag.array() / (gamma * diag.array() + 1.0)).cast<cplx>().matrix().asDiagonal() * v;
    }
    CVec w = u.adjoint() * v;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      w[j] *= diag[j] / (gamma * diag[j] + 1.0);
    }
    return u * w;
  }

  CMat dense_cov(double gamma) const {
    if (kind != Kind::Dense) {
      RVec d = (kind == Kind::Identity) ? RVec::Ones(m) : diag;
      return (d.array() / (gamma * d.array() + 1.0)).cast<cplx>().matrix().asDiagonal();
    }
    RVec s = (diag.array() / (gamma * diag.array() + 1.0)).matrix();
    return u * s.asDiagonal() * u.adjoint();
  }
};

}  // namespace detail

struct ChannelPosterior {
  CVec mean;
  CMat cov;
};

// Scalar-precision channel posterior for one user, computed from the residual
// matrices (the running-residual decomposition of the full per-slot sums).
// T_d = 0 reduces to the pilot-only conjugate-Gaussian estimate.
inline ChannelPosterior channel_posterior_mf(double gamma_p, const RVec& gamma_d,
                                             const Eigen::RowVectorXcd& xp_row,
                                             const Eigen::RowVectorXcd& xd_mean_row,
                                             const RVec& xd_var_row, const RVec& xd_second_row,
                                             const CMat& ep, const CMat& ed, const CMat& c_i,
                                             const CVec& h_mean_i) {
  if (!(gamma_p > 0.0)) throw std::invalid_argument("channel_posterior_mf: gamma_p must be positive");
  const Eigen::Index t_d = gamma_d.size();
  if (xd_mean_row.size() != t_d || xd_var_row.size() != t_d || xd_second_row.size() != t_d ||
      ed.cols() != t_d || ep.cols() != xp_row.size() || ep.rows() != h_mean_i.size()) {
    throw DimensionMismatch("channel_posterior_mf: inconsistent shapes");
  }
  for (Eigen::Index t = 0; t < t_d; ++t) {
    if (!(gamma_d[t] > 0.0)) throw std::invalid_argument("channel_posterior_mf: gamma_d must be positive");
  }
  double gamma_i = gamma_p * xp_row.squaredNorm() + gamma_d.dot(xd_second_row);
  double tau_term = gamma_d.dot(xd_var_row);
  CVec num = (gamma_i - tau_term) * h_mean_i;
  num += gamma_p * (ep * xp_row.adjoint());
  if (t_d > 0) {
    num += ed * xd_mean_row.adjoint().cwiseProduct(gamma_d.cast<cplx>());
  }
  detail::ChannelPrior prior = detail::ChannelPrior::build(c_i, false);
  ChannelPosterior post;
  post.mean = prior.apply(gamma_i, num);
  post.cov = prior.dense_cov(gamma_i);
  return post;
}

class JedEngine {
 public:
  JedEngine(const QuantizedBlock& yp, const QuantizedBlock& yd, const CMat& xp,
            const std::vector<CMat>& cs, const Constellation& cons, JedOptions opts,
            std::optional<double> fixed_n0 = std::nullopt)
      : yp_(yp), yd_(yd), xp_(xp), cons_(cons), opts_(opts), fixed_n0_(fixed_n0) {
    m_ = yp.values.rows();
    t_p_ = yp.values.cols();
    t_d_ = yd.values.cols();
    k_ = xp.rows();
    if (t_p_ < 1) throw DimensionMismatch("jed: need at least one pilot slot");
    if (yd.values.rows() != m_ && t_d_ > 0) throw DimensionMismatch("jed: Yd antenna count");
    if (xp.cols() != t_p_) throw DimensionMismatch("jed: Xp slot count");
    if (!cs.empty() && static_cast<Eigen::Index>(cs.size()) != k_) {
      throw DimensionMismatch("jed: covariance list size");
    }
    if (fixed_n0 && !(*fixed_n0 > 0.0)) throw std::invalid_argument("jed: N0 must be positive");

    lmmse_ = opts.algorithm == JedAlgo::LMMSEJED && !fixed_n0.has_value() &&
             !opts.force_scalar_precision;
    lite_ = opts.lite_resolved();

    priors_.reserve(k_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      CMat c = cs.empty() ? CMat(CMat::Identity(m_, m_)) : cs[i];
      if (c.rows() != m_ || c.cols() != m_) throw DimensionMismatch("jed: covariance shape");
      priors_.push_back(detail::ChannelPrior::build(c, lmmse_));
    }

    st_.Rp_mean = yp.values;
    st_.Rp_var = RMat::Zero(m_, t_p_);
    st_.Rd_mean = yd.values;
    st_.Rd_var = RMat::Zero(m_, t_d_);
    st_.H_mean = CMat::Zero(m_, k_);
    st_.h_trace.resize(k_);
    for (Eigen::Index i = 0; i < k_; ++i) st_.h_trace[i] = priors_[i].prior_trace;
    st_.Xd_mean = CMat::Zero(k_, t_d_);
    st_.Xd_var = RMat::Constant(k_, t_d_, cons.prior_var());
    st_.Xd_second = RMat::Constant(k_, t_d_, cons.prior_second_moment());
    st_.gamma_d = RVec::Zero(t_d_);
    st_.Ep = st_.Rp_mean;  // H = 0
    st_.Ed = st_.Rd_mean;
    st_.Z = CMat::Zero(k_, t_d_);
    st_.Zprec = RMat::Zero(k_, t_d_);

    pilot_pow_.resize(k_);
    for (Eigen::Index i = 0; i < k_; ++i) pilot_pow_[i] = xp.row(i).squaredNorm();

    if (lmmse_) {
      h_cov_.reserve(k_);
      for (Eigen::Index i = 0; i < k_; ++i) h_cov_.push_back(priors_[i].dense_cov(0.0));
      if (!lite_) st_.Gamma_t.assign(t_d_, CMat());
    }
  }

  // Pilot precision M-step plus the pilot-slot truncated moments; slots are
  // independent factors, refreshed as a block.
  void update_pilot_phase() {
    if (fixed_n0_) {
      st_.gamma_p = 1.0 / *fixed_n0_;
    } else {
      double denom = st_.Ep.squaredNorm() + st_.Rp_var.sum();
      for (Eigen::Index i = 0; i < k_; ++i) denom += pilot_pow_[i] * st_.h_trace[i];
      st_.gamma_p = cap_precision(double(m_ * t_p_), denom);
    }
    for (Eigen::Index t = 0; t < t_p_; ++t) {
      for (Eigen::Index r = 0; r < m_; ++r) {
        cplx s = st_.Rp_mean(r, t) - st_.Ep(r, t);
        MomentPair mp =
            truncated_complex_moments(s, st_.gamma_p, yp_.interval(r, t), opts_.cdf_mode);
        st_.Ep(r, t) += mp.mean - st_.Rp_mean(r, t);
        st_.Rp_mean(r, t) = mp.mean;
        st_.Rp_var(r, t) = mp.var;
      }
    }
  }

  // Data precisions (per slot, or pooled in lite mode) and the data-slot
  // truncated moments.
  void update_data_phase() {
    hn2_ = st_.H_mean.colwise().squaredNorm().transpose();
    if (!lmmse_) {
      if (fixed_n0_) {
        st_.gamma_d.setConstant(1.0 / *fixed_n0_);
      } else if (lite_ && t_d_ > 0) {
        double denom = 0.0;
        for (Eigen::Index t = 0; t < t_d_; ++t) denom += expected_data_residual(t);
        st_.gamma_d.setConstant(cap_precision(double(m_ * t_d_), denom));
      }
      for (Eigen::Index t = 0; t < t_d_; ++t) {
        if (!fixed_n0_ && !lite_) {
          st_.gamma_d[t] = cap_precision(double(m_), expected_data_residual(t));
        }
        for (Eigen::Index r = 0; r < m_; ++r) {
          cplx s = st_.Rd_mean(r, t) - st_.Ed(r, t);
          MomentPair mp =
              truncated_complex_moments(s, st_.gamma_d[t], yd_.interval(r, t), opts_.cdf_mode);
          st_.Ed(r, t) += mp.mean - st_.Rd_mean(r, t);
          st_.Rd_mean(r, t) = mp.mean;
          st_.Rd_var(r, t) = mp.var;
        }
      }
    } else {
      if (lite_ && t_d_ > 0) st_.Gamma = pooled_precision_matrix();
      for (Eigen::Index t = 0; t < t_d_; ++t) {
        if (!lite_) st_.Gamma_t[t] = slot_precision_matrix(t);
        const CMat& g = lite_ ? st_.Gamma : st_.Gamma_t[t];
        // Sequential antenna sweep; each update lands in the residual at once.
        for (Eigen::Index r = 0; r < m_; ++r) {
          double gmm = g(r, r).real();
          cplx s = st_.Rd_mean(r, t) - g.col(r).dot(st_.Ed.col(t)) / gmm;
          MomentPair mp = truncated_complex_moments(s, gmm, yd_.interval(r, t), opts_.cdf_mode);
          st_.Ed(r, t) += mp.mean - st_.Rd_mean(r, t);
          st_.Rd_mean(r, t) = mp.mean;
          st_.Rd_var(r, t) = mp.var;
        }
      }
    }
  }

  void iterate() {
    update_pilot_phase();
    update_data_phase();
    update_channel();
    update_symbols();
    ++iters_;
  }

  JedResult run() {
    for (int it = 0; it < opts_.max_iters; ++it) iterate();
    return finish();
  }

  JedResult finish() {
    JedResult res;
    res.iters_run = iters_;
    res.H_hat = st_.H_mean;
    res.Xd_hat.resize(k_, t_d_);
    res.Xd_idx.resize(k_, t_d_);
    res.soft.assign(k_, std::vector<DiscretePosterior>());
    for (Eigen::Index i = 0; i < k_; ++i) {
      res.soft[i].reserve(t_d_);
      for (Eigen::Index t = 0; t < t_d_; ++t) {
        DiscretePosterior post =
            iters_ > 0 ? discrete_posterior(st_.Z(i, t), st_.Zprec(i, t), cons_)
                       : DiscretePosterior{cons_.priors(), cons_.prior_mean(), cons_.prior_var(),
                                           cons_.prior_second_moment()};
        res.Xd_idx(i, t) = post.argmax();
        res.Xd_hat(i, t) = cons_.points()[res.Xd_idx(i, t)];
        res.soft[i].push_back(std::move(post));
      }
    }
    res.final_state = st_;
    return res;
  }

  const JedState& state() const { return st_; }
  int iters() const { return iters_; }

  void update_channel() { channel_phase(); }
  void update_symbols() { symbol_phase(); }

 private:
  static double cap_precision(double num, double denom) {
    double g = denom > 0.0 ? num / denom : 1e12;
    return g > 1e12 ? 1e12 : g;
  }

  // <||r_dt - H x_dt||^2> via the Theorem-1 expansion with diagonal symbol
  // covariance and per-user channel covariance traces.
  double expected_data_residual(Eigen::Index t) const {
    double v = st_.Ed.col(t).squaredNorm() + st_.Rd_var.col(t).sum();
    for (Eigen::Index i = 0; i < k_; ++i) {
      v += st_.Xd_second(i, t) * st_.h_trace[i] + st_.Xd_var(i, t) * hn2_[i];
    }
    return v;
  }

  CMat pooled_precision_matrix() const {
    CMat a = (st_.Ed.squaredNorm() / double(m_)) * CMat::Identity(m_, m_);
    a += st_.Rd_var.rowwise().sum().cast<cplx>().asDiagonal();
    for (Eigen::Index i = 0; i < k_; ++i) a += st_.Xd_second.row(i).sum() * h_cov_[i];
    a += st_.H_mean * st_.Xd_var.rowwise().sum().cast<cplx>().asDiagonal() * st_.H_mean.adjoint();
    return double(t_d_) * invert_pd(a, "jed pooled precision");
  }

  CMat slot_precision_matrix(Eigen::Index t) const {
    CMat a = (st_.Ed.col(t).squaredNorm() / double(m_)) * CMat::Identity(m_, m_);
    a += st_.Rd_var.col(t).cast<cplx>().asDiagonal();
    for (Eigen::Index i = 0; i < k_; ++i) a += st_.Xd_second(i, t) * h_cov_[i];
    a += st_.H_mean * st_.Xd_var.col(t).cast<cplx>().asDiagonal() * st_.H_mean.adjoint();
    return invert_pd(a, "jed slot precision");
  }

  static CMat invert_pd(const CMat& a, const char* what) {
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success) {
      throw SingularCovariance(std::string(what) + ": not positive definite");
    }
    RVec ld = llt.matrixLLT().diagonal().real();
    double cmax = ld.maxCoeff(), cmin = ld.minCoeff();
    if (!(cmin > 0.0) || (cmax / cmin) * (cmax / cmin) > 1e14) {
      throw SingularCovariance(std::string(what) + ": numerically singular");
    }
    return llt.solve(CMat::Identity(a.rows(), a.cols()));
  }

  void channel_phase() {
    for (Eigen::Index i = 0; i < k_; ++i) {
      CVec h_old = st_.H_mean.col(i);
      CVec h_new;
      if (!lmmse_) {
        double gamma_i = st_.gamma_p * pilot_pow_[i] + st_.gamma_d.dot(st_.Xd_second.row(i));
        double tau_term = st_.gamma_d.dot(st_.Xd_var.row(i));
        CVec num = (gamma_i - tau_term) * h_old;
        num += st_.gamma_p * (st_.Ep * xp_.row(i).adjoint());
        if (t_d_ > 0) {
          num += st_.Ed * st_.Xd_mean.row(i).adjoint().cwiseProduct(st_.gamma_d.cast<cplx>());
        }
        h_new = priors_[i].apply(gamma_i, num);
        st_.h_trace[i] = priors_[i].trace(gamma_i);
      } else {
        const double c_i = st_.gamma_p * pilot_pow_[i];
        CVec b = c_i * h_old + st_.gamma_p * (st_.Ep * xp_.row(i).adjoint());
        CMat gamma_mat = c_i * CMat::Identity(m_, m_);
        if (t_d_ > 0) {
          if (lite_) {
            double s2 = st_.Xd_second.row(i).sum();
            double sabs = s2 - st_.Xd_var.row(i).sum();  // sum_t |<x_it>|^2
            gamma_mat += s2 * st_.Gamma;
            b += sabs * (st_.Gamma * h_old);
            b += st_.Gamma * (st_.Ed * st_.Xd_mean.row(i).adjoint());
          } else {
            for (Eigen::Index t = 0; t < t_d_; ++t) {
              gamma_mat += st_.Xd_second(i, t) * st_.Gamma_t[t];
              b += (st_.Xd_second(i, t) - st_.Xd_var(i, t)) * (st_.Gamma_t[t] * h_old);
              b += std::conj(st_.Xd_mean(i, t)) * (st_.Gamma_t[t] * st_.Ed.col(t));
            }
          }
        }
        CMat a = gamma_mat + priors_[i].cinv;
        h_cov_[i] = invert_pd(a, "jed channel posterior");
        h_new = h_cov_[i] * b;
        st_.h_trace[i] = h_cov_[i].trace().real();
      }
      CVec diff = h_old - h_new;
      st_.Ep += diff * xp_.row(i);
      if (t_d_ > 0) st_.Ed += diff * st_.Xd_mean.row(i);
      st_.H_mean.col(i) = h_new;
    }
    hn2_ = st_.H_mean.colwise().squaredNorm().transpose();
  }

  void symbol_phase() {
    const bool const_mod = cons_.constant_modulus();
    CMat gh;      // Gamma * H for the lite LMMSE symbol sweep
    RVec tr_gs;   // Tr{Gamma Sigma_{h_i}}
    if (lmmse_ && lite_ && t_d_ > 0) {
      gh = st_.Gamma * st_.H_mean;
      tr_gs.resize(k_);
      for (Eigen::Index i = 0; i < k_; ++i) {
        tr_gs[i] = st_.Gamma.cwiseProduct(h_cov_[i].transpose()).sum().real();
      }
    }
    for (Eigen::Index t = 0; t < t_d_; ++t) {
      CMat gh_t;
      RVec tr_t;
      if (lmmse_ && !lite_) {
        gh_t = st_.Gamma_t[t] * st_.H_mean;
        tr_t.resize(k_);
        for (Eigen::Index i = 0; i < k_; ++i) {
          tr_t[i] = st_.Gamma_t[t].cwiseProduct(h_cov_[i].transpose()).sum().real();
        }
      }
      for (Eigen::Index i = 0; i < k_; ++i) {
        cplx z;
        double prec;
        if (!lmmse_) {
          double denom = hn2_[i] + st_.h_trace[i];
          z = (hn2_[i] * st_.Xd_mean(i, t) + st_.H_mean.col(i).dot(st_.Ed.col(t))) / denom;
          prec = st_.gamma_d[t] * denom;
        } else {
          const CMat& ghm = lite_ ? gh : gh_t;
          double hgh = st_.H_mean.col(i).dot(ghm.col(i)).real();
          double denom = hgh + (lite_ ? tr_gs[i] : tr_t[i]);
          z = (hgh * st_.Xd_mean(i, t) + ghm.col(i).dot(st_.Ed.col(t))) / denom;
          prec = denom;
        }
        detail::PosteriorStats ps = detail::posterior_stats(z, prec, cons_);
        st_.Ed.col(t) += st_.H_mean.col(i) * (st_.Xd_mean(i, t) - ps.mean);
        st_.Xd_mean(i, t) = ps.mean;
        st_.Xd_var(i, t) = ps.var;
        if (!const_mod) st_.Xd_second(i, t) = ps.second;
        st_.Z(i, t) = z;
        st_.Zprec(i, t) = prec;
      }
    }
  }

  const QuantizedBlock& yp_;
  const QuantizedBlock& yd_;
  CMat xp_;
  Constellation cons_;
  JedOptions opts_;
  std::optional<double> fixed_n0_;
  Eigen::Index m_ = 0, t_p_ = 0, t_d_ = 0, k_ = 0;
  bool lmmse_ = false, lite_ = false;
  std::vector<detail::ChannelPrior> priors_;
  std::vector<CMat> h_cov_;  // dense Sigma_{h_i}, maintained on the LMMSE path
  RVec pilot_pow_;
  RVec hn2_;
  JedState st_;
  int iters_ = 0;
};

inline JedResult mf_qvb_jed(const QuantizedBlock& yp, const QuantizedBlock& yd, const CMat& xp,
                            const std::vector<CMat>& cs, const Constellation& cons,
                            JedOptions opts = {}) {
  opts.algorithm = JedAlgo::MFJED;
  return JedEngine(yp, yd, xp, cs, cons, opts).run();
}

inline JedResult lmmse_qvb_jed(const QuantizedBlock& yp, const QuantizedBlock& yd, const CMat& xp,
                               const std::vector<CMat>& cs, const Constellation& cons,
                               JedOptions opts = {}) {
  opts.algorithm = JedAlgo::LMMSEJED;
  return JedEngine(yp, yd, xp, cs, cons, opts).run();
}

inline JedResult conv_qvb_jed(const QuantizedBlock& yp, const QuantizedBlock& yd, const CMat& xp,
                              const std::vector<CMat>& cs, const Constellation& cons, double n0,
                              JedOptions opts = {}) {
  opts.algorithm = JedAlgo::ConvJED;
  return JedEngine(yp, yd, xp, cs, cons, opts, n0).run();
}

}  // namespace fewbit
