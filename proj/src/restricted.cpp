#include "smssvd/restricted.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace smssvd {

SubspaceBasis make_subspace_basis(Matrix basis) {
  const Index n = basis.rows();
  const Index d = basis.cols();
  if (d < 1 || d > n) {
    throw std::invalid_argument("subspace dimension must be in [1, N]");
  }
  const Matrix gram = basis.transpose() * basis;
  const double dev = (gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    throw std::invalid_argument("subspace basis columns not orthonormal (deviation " +
                                std::to_string(dev) + ")");
  }
  return SubspaceBasis{std::move(basis)};
}

Matrix orthonormalize(const Matrix& span) {
  if (span.cols() == 0) return span;
  Eigen::HouseholderQR<Matrix> qr(span);
  const Index d = std::min(span.rows(), span.cols());
  return qr.householderQ() * Matrix::Identity(span.rows(), d);
}

SvdFactors restrict_svd(const Matrix& x, const SubspaceBasis& subspace) {
  const Matrix& b = subspace.basis;
  if (x.cols() != b.rows()) {
    throw std::invalid_argument("restrict_svd: domain dimension mismatch");
  }
  const Matrix mapped = x * b;  // P x d
  Eigen::BDCSVD<Matrix> svd(mapped, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const Vector sx = singular_values(x);
  const double floor = kDefaultRankTol * (sx.size() ? sx(0) : 0.0);
  if (sv.size() < b.cols() || sv(sv.size() - 1) <= floor) {
    throw std::runtime_error(
        "restrict_svd: x is rank deficient on the subspace (subspace meets the kernel)");
  }
  SvdFactors f;
  f.u = svd.matrixU();
  f.sigma = sv;
  f.v = b * svd.matrixV();
  apply_sign_convention(f.u, f.v);
  return f;
}

RestrictionReport check_restriction(const Matrix& x, const SvdFactors& f, double rank_tol) {
  RestrictionReport rep{};
  rep.dim = f.dim();

  Eigen::BDCSVD<Matrix> full(x, Eigen::ComputeThinV);
  const Vector& sx = full.singularValues();
  Index rank_x = 0;
  if (sx.size() > 0 && sx(0) > 0.0) {
    const double cutoff = rank_tol * sx(0);
    while (rank_x < sx.size() && sx(rank_x) > cutoff) ++rank_x;
  }
  rep.rank_x = rank_x;

  // v stays inside the row space of x
  if (rank_x > 0) {
    const Matrix row_basis = full.matrixV().leftCols(rank_x);
    rep.kernel_residual = (f.v - row_basis * (row_basis.transpose() * f.v)).cwiseAbs().maxCoeff();
  } else {
    rep.kernel_residual = f.v.cwiseAbs().maxCoeff();
  }

  const Matrix xv = x * f.v;
  rep.map_residual = (xv - f.u * f.sigma.asDiagonal()).cwiseAbs().maxCoeff();
  rep.cokernel_residual = (f.u - xv * f.sigma.cwiseInverse().asDiagonal()).cwiseAbs().maxCoeff();

  // u^T x v v^T == sigma v^T
  const Matrix utx = f.u.transpose() * x;
  rep.left_residual =
      ((utx * f.v) * f.v.transpose() - f.sigma.asDiagonal() * f.v.transpose()).cwiseAbs().maxCoeff();

  // deflated matrix already annihilates the captured right span
  Matrix deflated = x;
  deflated.noalias() -= f.u * utx;
  rep.deflation_residual = ((deflated * f.v) * f.v.transpose()).cwiseAbs().maxCoeff();

  rep.rank_deflated = numerical_rank(deflated, rank_tol);
  rep.rank_gap = std::abs(static_cast<double>(rep.rank_x) - static_cast<double>(rep.dim) -
                          static_cast<double>(rep.rank_deflated));
  return rep;
}

}  // namespace smssvd
