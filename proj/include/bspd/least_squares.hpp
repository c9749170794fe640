// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "bspd/error.hpp"
#include "bspd/types.hpp"

namespace bspd {

inline constexpr double kPinvCutoff = 1e-10;  // relative to the largest singular value

// Minimum-norm least squares on a column subset of a sensing matrix. A
// pivoted QR screens the rank; only if it reports a (near) deficiency is the
// submatrix re-solved by SVD with the singular-value cutoff.
class SupportSolver {
 public:
  SupportSolver(const CMatrix& a, std::span<const GridIndex> support) {
    if (support.empty()) throw InvalidParameter("least squares: empty support");
    if (support.size() > static_cast<std::size_t>(a.rows()))
      throw InvalidParameter("least squares: support larger than the number of observations");
    sub_.resize(a.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (support[j] >= static_cast<std::size_t>(a.cols()))
        throw InvalidParameter("least squares: column index out of range");
      sub_.col(static_cast<Eigen::Index>(j)) = a.col(static_cast<Eigen::Index>(support[j]));
    }
    qr_.setThreshold(1e-8);
    qr_.compute(sub_);
    if (qr_.rank() < sub_.cols()) {
      svd_.emplace(sub_, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd_->setThreshold(kPinvCutoff);
    }
  }

  const CMatrix& columns() const { return sub_; }

  template <class Rhs>
  CMatrix solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    if (rhs.rows() != sub_.rows()) throw DimensionMismatch("least squares: rhs row count mismatch");
    if (svd_) return svd_->solve(rhs);
    return qr_.solve(rhs);
  }

 private:
  CMatrix sub_;
  Eigen::ColPivHouseholderQR<CMatrix> qr_;
  std::optional<Eigen::JacobiSVD<CMatrix>> svd_;
};

// Coefficients of pinv(A(:, idx)) y scattered into a length-N vector.
inline CVector ls_on_columns(const CVector& y, const CMatrix& a, std::span<const GridIndex> idx) {
  const SupportSolver solver(a, idx);
  const CVector s = solver.solve(y);
  CVector out = CVector::Zero(a.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) out(static_cast<Eigen::Index>(idx[j])) += s(static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace bspd
