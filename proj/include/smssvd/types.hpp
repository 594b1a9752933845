#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace smssvd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Dense variables-by-samples matrix with row/column identifiers.
struct DataMatrix {
  Matrix values;  // P x N
  std::vector<std::string> variable_ids;
  std::vector<std::string> sample_ids;

  Index n_variables() const { return values.rows(); }
  Index n_samples() const { return values.cols(); }
};

// Throws std::invalid_argument on empty shape, non-finite entries,
// id-count mismatch or duplicate ids.
void validate(const DataMatrix& m);

// Wraps a raw matrix with generated ids v0..v{P-1} / s0..s{N-1}.
DataMatrix make_data_matrix(Matrix values);

// Thin SVD triple. Columns of u and v are orthonormal, sigma is
// nonincreasing and nonnegative, and column signs follow the convention
// applied by apply_sign_convention.
struct SvdFactors {
  Matrix u;      // P x d
  Vector sigma;  // d
  Matrix v;      // N x d

  Index dim() const { return sigma.size(); }
};

}  // namespace smssvd
