#pragma once

#include "smssvd/linalg.hpp"

namespace smssvd {

// Rank-1 penalized decomposition with an L1 bound on the variable factor,
// deflated to several factors.
struct SpcConfig {
  double c = 0.0;       // L1 bound on each unit-norm variable factor, in [1, sqrt(P)]
  int n_factors = 1;
  int max_iter = 200;
  double conv_tol = 1e-7;
};

struct SpcFactors {
  Matrix u;      // P x m, unit-norm columns, possibly sparse, not orthogonal
  Vector sigma;  // m
  Matrix v;      // N x m, orthonormal columns
  std::vector<bool> converged;  // per factor
  std::vector<std::vector<double>> objective_trace;  // u^T x v per alternation

  Index count() const { return sigma.size(); }
};

// sign(x_i) * max(|x_i| - lambda, 0) elementwise.
Vector soft_threshold(const Vector& x, double lambda);

// Alternating updates per factor: v from the current residual matrix and
// u soft-thresholded with the smallest lambda (bisection) that meets the
// L1 bound; later v's are orthogonalized against earlier ones. Factors
// that hit max_iter are returned at their best iterate and flagged.
SpcFactors spc(const Matrix& x, const SpcConfig& config);

}  // namespace smssvd
