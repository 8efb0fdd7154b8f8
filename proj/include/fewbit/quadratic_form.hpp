#pragma once

// Expected quadratic form <(y - Ax)^H B (y - Ax)> for independent variational
// factors over y, the columns of A, and x. B is an arbitrary Hermitian matrix;
// the result is real. Covariances of deterministic quantities are passed as
// zero matrices (or an empty column-covariance list).

#include <vector>

#include "fewbit/errors.hpp"
#include "fewbit/types.hpp"

namespace fewbit {

inline double expected_quadratic_form(const CVec& mean_y, const CMat& cov_y, const CMat& mean_a,
                                      const std::vector<CMat>& col_covs_a, const CVec& mean_x,
                                      const CMat& cov_x, const CMat& b) {
  const Eigen::Index m = mean_y.size();
  const Eigen::Index n = mean_x.size();
  if (mean_a.rows() != m || mean_a.cols() != n) {
    throw DimensionMismatch("expected_quadratic_form: A shape");
  }
  if (cov_y.rows() != m || cov_y.cols() != m || cov_x.rows() != n || cov_x.cols() != n ||
      b.rows() != m || b.cols() != m) {
    throw DimensionMismatch("expected_quadratic_form: covariance/B shape");
  }
  if (!col_covs_a.empty() && static_cast<Eigen::Index>(col_covs_a.size()) != n) {
    throw DimensionMismatch("expected_quadratic_form: column covariance count");
  }
  for (const CMat& c : col_covs_a) {
    if (c.rows() != m || c.cols() != m) {
      throw DimensionMismatch("expected_quadratic_form: column covariance shape");
    }
  }

  CVec resid = mean_y - mean_a * mean_x;
  cplx acc = resid.dot(b * resid);          // (y-Ax)^H B (y-Ax) at the means
  acc += (b * cov_y).trace();               // Tr{B Sigma_y}

  if (!col_covs_a.empty()) {
    RVec d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      d[i] = (b * col_covs_a[i]).trace().real();
    }
    acc += mean_x.cwiseAbs2().dot(d);       // <x>^H D <x>
    acc += cov_x.diagonal().real().dot(d);  // Tr{Sigma_x D}
  }

  CMat ahba = mean_a.adjoint() * b * mean_a;
  acc += (cov_x * ahba).trace();            // Tr{Sigma_x A^H B A}
  return acc.real();
}

}  // namespace fewbit
