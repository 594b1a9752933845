#include "smssvd/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smssvd {

bool all_finite(const Matrix& x) {
  return x.allFinite();
}

void apply_sign_convention(Matrix& u, Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index lead = 0;
    double best = -1.0;
    for (Index i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, j));
      if (a > best) {
        best = a;
        lead = i;
      }
    }
    if (v(lead, j) < 0.0) {
      v.col(j) = -v.col(j);
      if (j < u.cols()) u.col(j) = -u.col(j);
    }
  }
}

SvdFactors svd_truncated(const Matrix& x, Index d) {
  if (!all_finite(x)) throw std::invalid_argument("svd_truncated: non-finite input");
  const Index max_d = std::min(x.rows(), x.cols());
  if (d < 1 || d > max_d) {
    throw std::invalid_argument("svd_truncated: rank " + std::to_string(d) +
                                " out of range [1, " + std::to_string(max_d) + "]");
  }
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f;
  f.u = svd.matrixU().leftCols(d);
  f.sigma = svd.singularValues().head(d);
  f.v = svd.matrixV().leftCols(d);
  apply_sign_convention(f.u, f.v);
  return f;
}

Vector singular_values(const Matrix& x) {
  if (!all_finite(x)) throw std::invalid_argument("singular_values: non-finite input");
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues();
}

Vector singular_values_gram(const Matrix& x) {
  const bool tall = x.rows() >= x.cols();
  Matrix gram;
  if (tall) {
    gram.noalias() = x.transpose() * x;
  } else {
    gram.noalias() = x * x.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();  // ascending
  Vector sv(ev.size());
  for (Index i = 0; i < ev.size(); ++i) {
    sv(i) = std::sqrt(std::max(0.0, ev(ev.size() - 1 - i)));
  }
  return sv;
}

Matrix project_complement(const Matrix& x, const Matrix& u) {
  if (u.cols() == 0) return x;
  if (u.rows() != x.rows()) {
    throw std::invalid_argument("project_complement: row count mismatch");
  }
  const Matrix gram = u.transpose() * u;
  const double dev = (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw std::invalid_argument("project_complement: basis columns not orthonormal");
  }
  Matrix result = x;
  result.noalias() -= u * (u.transpose() * x);
  return result;
}

Index numerical_rank(const Matrix& x, double rel_tol) {
  if (rel_tol <= 0.0) throw std::invalid_argument("numerical_rank: rel_tol must be positive");
  const Vector sv = singular_values(x);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = rel_tol * sv(0);
  Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return r;
}

}  // namespace smssvd
