#pragma once

#include <array>

#include "smssvd/linalg.hpp"

namespace smssvd {

// Orthonormal basis of a subspace of sample space.
struct SubspaceBasis {
  Matrix basis;  // N x d

  Index dim() const { return basis.cols(); }
};

// Validates orthonormality to 1e-10 (max-abs) and 1 <= d <= N.
SubspaceBasis make_subspace_basis(Matrix basis);

// Thin-QR orthonormal basis for the column span of a general spanning set.
Matrix orthonormalize(const Matrix& span);

// SVD of x confined to the given subspace of its domain: factors
// x * B = u * diag(sigma) * w^T and lifts the right factors back as
// v = B * w. The subspace must stay clear of the kernel of x, checked as
// sigma_min(x * B) > 1e-10 * sigma_max(x); throws std::runtime_error
// otherwise, std::invalid_argument on dimension mismatch.
SvdFactors restrict_svd(const Matrix& x, const SubspaceBasis& subspace);

// Residuals of the algebraic identities a restricted SVD satisfies.
// All are max-abs entrywise except the rank gap, which is an exact
// integer difference reported as a double.
struct RestrictionReport {
  double kernel_residual;     // v columns lie in the row space of x
  double cokernel_residual;   // u == x v sigma^{-1}
  double map_residual;        // x v == u sigma
  double left_residual;       // u^T x == sigma v^T + u^T x (I - v v^T)
  double deflation_residual;  // (I-u u^T) x (I - v v^T) == (I-u u^T) x
  double rank_gap;            // |rank x - d - rank (I-u u^T) x|
  Index rank_x;
  Index rank_deflated;
  Index dim;

  // The rank identity appears twice in the contract; the last two slots
  // both carry rank_gap.
  std::array<double, 7> residuals() const {
    return {kernel_residual, cokernel_residual, map_residual,
            left_residual,   deflation_residual, rank_gap, rank_gap};
  }
  double max_identity_residual() const {
    return std::max({kernel_residual, cokernel_residual, map_residual,
                     left_residual, deflation_residual});
  }
};

RestrictionReport check_restriction(const Matrix& x, const SvdFactors& f,
                                    double rank_tol = kDefaultRankTol);

}  // namespace smssvd
