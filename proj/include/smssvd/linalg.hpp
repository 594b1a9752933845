#pragma once

#include "smssvd/types.hpp"

namespace smssvd {

inline constexpr double kDefaultRankTol = 1e-10;

bool all_finite(const Matrix& x);

// Fixes column signs in place: in each column of v the entry of largest
// magnitude is made nonnegative (lowest index wins ties); the matching
// column of u is flipped with it. Idempotent.
void apply_sign_convention(Matrix& u, Matrix& v);

// Leading d singular triplets of x under the sign convention.
// Throws std::invalid_argument if d is out of [1, min(P, N)] or x has
// non-finite entries.
SvdFactors svd_truncated(const Matrix& x, Index d);

// All singular values of x, descending.
Vector singular_values(const Matrix& x);

// Singular values via an eigendecomposition of the Gram matrix. Same
// values, much cheaper when one dimension is long; accuracy is limited
// to ~sqrt(eps) * sigma_max, which is fine for energy ratios.
Vector singular_values_gram(const Matrix& x);

// (I - u u^T) x. u must have orthonormal columns (checked to 1e-8);
// u with zero columns returns x unchanged.
Matrix project_complement(const Matrix& x, const Matrix& u);

// Number of singular values above rel_tol * sigma_max; 0 for the zero
// matrix. Throws on non-finite input or rel_tol <= 0.
Index numerical_rank(const Matrix& x, double rel_tol = kDefaultRankTol);

}  // namespace smssvd
