#pragma once

// Block-fading channel generation: spatial covariances (i.i.d. or Laplacian
// power angle spectrum on a half-wavelength ULA), channel/noise sampling, DFT
// pilots, and frame assembly.

#include <cmath>
#include <vector>

#include "fewbit/constellation.hpp"
#include "fewbit/errors.hpp"
#include "fewbit/rng.hpp"
#include "fewbit/types.hpp"

namespace fewbit {

struct ChannelModel {
  int antennas = 0;
  int users = 0;
  std::vector<CMat> covs;   // one per user; empty means identity for everyone
  std::vector<CMat> roots;  // matching C^{1/2} factors, empty for i.i.d.

  static ChannelModel iid(int m, int k) {
    ChannelModel model;
    model.antennas = m;
    model.users = k;
    return model;
  }

  static ChannelModel correlated(std::vector<CMat> user_covs) {
    if (user_covs.empty()) throw std::invalid_argument("channel model: no covariances");
    ChannelModel model;
    model.antennas = static_cast<int>(user_covs[0].rows());
    model.users = static_cast<int>(user_covs.size());
    model.covs = std::move(user_covs);
    model.roots.reserve(model.covs.size());
    for (const CMat& c : model.covs) {
      if (c.rows() != model.antennas || c.cols() != model.antennas) {
        throw DimensionMismatch("channel model: covariance shape");
      }
      Eigen::SelfAdjointEigenSolver<CMat> eig(c);
      RVec lam = eig.eigenvalues().cwiseMax(0.0);
      model.roots.push_back(eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                            eig.eigenvectors().adjoint());
    }
    return model;
  }

  CMat cov(int i) const {
    if (covs.empty()) return CMat::Identity(antennas, antennas);
    return covs[i];
  }
};

// Spatial covariance of a ULA with half-wavelength spacing under a truncated
// Laplacian power angle spectrum centered at mean_angle. The angle spread is
// the standard deviation of the (untruncated) Laplacian, i.e. scale
// angle_spread/sqrt(2). Entries depend only on antenna offset, so we build the
// Hermitian Toeplitz matrix from one quadrature pass per offset; dividing by
// the zeroth coefficient sets the diagonal to exactly one.
inline CMat laplacian_covariance(int m, double mean_angle, double angle_spread) {
  if (m < 1) throw std::invalid_argument("laplacian_covariance: M must be >= 1");
  if (!(angle_spread > 0.0) || !(angle_spread < std::numbers::pi / 2)) {
    throw std::invalid_argument("laplacian_covariance: angle spread out of range");
  }
  const int segments = 8192;  // Simpson; > 4096 points
  const double beta = angle_spread / std::sqrt(2.0);
  const double lo = mean_angle - std::numbers::pi / 2;
  const double hi = mean_angle + std::numbers::pi / 2;
  const double h = (hi - lo) / segments;

  std::vector<cplx> coeff(m, cplx(0.0, 0.0));
  for (int j = 0; j <= segments; ++j) {
    double theta = lo + j * h;
    double w = (j == 0 || j == segments) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    double dens = std::exp(-std::abs(theta - mean_angle) / beta);
    double phase = std::numbers::pi * std::sin(theta);
    cplx rot(std::cos(phase), std::sin(phase));
    cplx e(w * dens, 0.0);  // w * dens * e^{j k phase}, built up by recurrence
    for (int k = 0; k < m; ++k) {
      coeff[k] += e;
      e *= rot;
    }
  }
  double c0 = coeff[0].real();
  if (!(c0 > 0.0)) throw QuadratureFailure("laplacian_covariance: degenerate density mass");

  CMat c(m, m);
  for (int r = 0; r < m; ++r) {
    for (int s = 0; s < m; ++s) {
      int k = r - s;
      cplx v = coeff[std::abs(k)] / c0;
      c(r, s) = k >= 0 ? v : std::conj(v);
    }
  }

  Eigen::SelfAdjointEigenSolver<CMat> eig(c);
  double lmin = eig.eigenvalues().minCoeff();
  if (lmin < -1e-8 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw QuadratureFailure("laplacian_covariance: covariance far from PSD");
  }
  if (lmin < 0.0) {
    RVec lam = eig.eigenvalues().cwiseMax(0.0);
    c = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
    RVec d = c.diagonal().real().cwiseMax(1e-300).cwiseInverse().cwiseSqrt();
    c = d.asDiagonal() * c * d.asDiagonal();
  }
  return c;
}

// Column i is C_i^{1/2} w with w standard complex normal; columns independent.
inline CMat sample_channel(const ChannelModel& model, Rng& rng) {
  CMat h(model.antennas, model.users);
  CVec w(model.antennas);
  for (int i = 0; i < model.users; ++i) {
    for (int m = 0; m < model.antennas; ++m) w[m] = rng.cgaussian(1.0);
    if (model.roots.empty()) {
      h.col(i) = w;
    } else {
      h.col(i) = model.roots[i] * w;
    }
  }
  return h;
}

// First K rows of the T_p-point DFT matrix scaled by sqrt(power); rows satisfy
// Xp Xp^H = T_p * power * I exactly.
inline CMat build_pilots(int k, int t_p, double power = 1.0) {
  if (t_p < k || k < 1) throw InvalidLength("build_pilots: need T_p >= K >= 1");
  if (!(power > 0.0)) throw std::invalid_argument("build_pilots: power must be positive");
  CMat xp(k, t_p);
  double amp = std::sqrt(power);
  for (int i = 0; i < k; ++i) {
    for (int t = 0; t < t_p; ++t) {
      double phi = -2.0 * std::numbers::pi * double(i) * double(t) / double(t_p);
      xp(i, t) = amp * cplx(std::cos(phi), std::sin(phi));
    }
  }
  return xp;
}

struct FrameRealization {
  CMat H;                   // M x K
  CMat Xp;                  // K x T_p pilots
  CMat Xd;                  // K x T_d data symbols
  Eigen::MatrixXi Xd_idx;   // constellation index of each data symbol
  CMat Rp, Rd;              // unquantized receives
  double N0 = 0.0;
};

inline FrameRealization sample_frame(const ChannelModel& model, const Constellation& cons,
                                     int t_p, int t_d, double n0, Rng& rng,
                                     double pilot_power = 1.0) {
  if (t_d < 0 || n0 < 0.0) throw std::invalid_argument("sample_frame: bad arguments");
  FrameRealization f;
  f.N0 = n0;
  f.H = sample_channel(model, rng);
  f.Xp = build_pilots(model.users, t_p, pilot_power);

  f.Xd.resize(model.users, t_d);
  f.Xd_idx.resize(model.users, t_d);
  const auto& pts = cons.points();
  const auto& pri = cons.priors();
  for (int t = 0; t < t_d; ++t) {
    for (int i = 0; i < model.users; ++i) {
      double u = rng.uniform();
      double acc = 0.0;
      int idx = static_cast<int>(pts.size()) - 1;
      for (size_t a = 0; a < pts.size(); ++a) {
        acc += pri[a];
        if (u < acc) {
          idx = static_cast<int>(a);
          break;
        }
      }
      f.Xd_idx(i, t) = idx;
      f.Xd(i, t) = pts[idx];
    }
  }

  f.Rp = f.H * f.Xp;
  for (Eigen::Index c = 0; c < f.Rp.cols(); ++c) {
    for (Eigen::Index m = 0; m < f.Rp.rows(); ++m) f.Rp(m, c) += rng.cgaussian(n0);
  }
  f.Rd = f.H * f.Xd;
  for (Eigen::Index c = 0; c < f.Rd.cols(); ++c) {
    for (Eigen::Index m = 0; m < f.Rd.rows(); ++m) f.Rd(m, c) += rng.cgaussian(n0);
  }
  return f;
}

}  // namespace fewbit
