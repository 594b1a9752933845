#include "smssvd/engine.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace smssvd {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ZeroResidual: return "zero residual";
    case StopReason::ComponentBudget: return "component budget";
    case StopReason::ScoreBelowThreshold: return "score below threshold";
    case StopReason::SelectionInfeasible: return "selection infeasible";
    case StopReason::NumericalFailure: return "numerical failure";
  }
  return "unknown";
}

Matrix Decomposition::concatenated_u() const {
  Matrix u(n_variables, total_dim);
  Index col = 0;
  for (const auto& b : blocks) {
    u.middleCols(col, b.dim()) = b.u;
    col += b.dim();
  }
  return u;
}

Vector Decomposition::concatenated_sigma() const {
  Vector s(total_dim);
  Index at = 0;
  for (const auto& b : blocks) {
    s.segment(at, b.dim()) = b.sigma;
    at += b.dim();
  }
  return s;
}

Matrix Decomposition::concatenated_v() const {
  Matrix v(n_samples, total_dim);
  Index col = 0;
  for (const auto& b : blocks) {
    v.middleCols(col, b.dim()) = b.v;
    col += b.dim();
  }
  return v;
}

Decomposition decompose(const Matrix& x, const EngineConfig& config, const Rng& rng) {
  if (!all_finite(x)) throw std::invalid_argument("smssvd: non-finite input");
  if (config.max_components < 1) throw std::invalid_argument("smssvd: max_components must be >= 1");
  const Index p = x.rows();
  const Index n = x.cols();
  const Index d_max = config.d_max > 0 ? config.d_max : std::min<Index>(n - 1, 20);
  const std::vector<double> grid = config.keep_fraction_grid.empty()
                                       ? default_keep_fraction_grid(p, d_max)
                                       : config.keep_fraction_grid;

  Decomposition dec;
  dec.n_variables = p;
  dec.n_samples = n;

  const double input_norm = x.norm();
  Matrix residual = x;
  for (int iteration = 0;; ++iteration) {
    if (input_norm == 0.0 || residual.norm() < 1e-8 * input_norm) {
      dec.stop_reason = StopReason::ZeroResidual;
      break;
    }
    const Index room = std::min({static_cast<Index>(config.max_components) - dec.total_dim,
                                 std::min(p, n) - dec.total_dim});
    if (room < 1) {
      dec.stop_reason = StopReason::ComponentBudget;
      break;
    }

    SelectionChoice choice;
    try {
      choice = optimize_selection(residual, grid, std::min(d_max, room),
                                  rng.substream(static_cast<std::uint64_t>(iteration)),
                                  config.null_samples);
    } catch (const std::runtime_error&) {
      dec.stop_reason = StopReason::SelectionInfeasible;
      break;
    }
    if (choice.record.score <= config.min_score) {
      dec.stop_reason = StopReason::ScoreBelowThreshold;
      break;
    }

    const Matrix filtered = select_rows(residual, choice.selection);
    Index dim = choice.dim;
    const Index filtered_rank = numerical_rank(filtered, config.rank_tol);
    if (filtered_rank < dim) dim = filtered_rank;  // keep the lift full rank
    if (dim < 1) {
      dec.stop_reason = StopReason::SelectionInfeasible;
      break;
    }

    DecompositionBlock block;
    try {
      const SvdFactors filtered_svd = svd_truncated(filtered, dim);
      const SvdFactors lifted = restrict_svd(residual, make_subspace_basis(filtered_svd.v));
      block.u = lifted.u;
      block.sigma = lifted.sigma;
      block.v = lifted.v;
    } catch (const std::exception&) {
      dec.stop_reason = StopReason::NumericalFailure;
      break;
    }
    block.selection = std::move(choice.selection);
    block.score_record = choice.record;
    block.iteration_index = iteration;

    residual = project_complement(residual, block.u);
    dec.total_dim += block.dim();
    dec.blocks.push_back(std::move(block));
  }
  return dec;
}

Decomposition decompose(const DataMatrix& x, const EngineConfig& config, const Rng& rng) {
  validate(x);
  return decompose(x.values, config, rng);
}

Matrix reconstruct(const Decomposition& dec) {
  std::vector<int> all(dec.blocks.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return reconstruct(dec, all);
}

Matrix reconstruct(const Decomposition& dec, const std::vector<int>& block_subset) {
  Matrix sum = Matrix::Zero(dec.n_variables, dec.n_samples);
  for (int idx : block_subset) {
    if (idx < 0 || static_cast<size_t>(idx) >= dec.blocks.size()) {
      throw std::invalid_argument("reconstruct: block index out of range");
    }
    const auto& b = dec.blocks[static_cast<size_t>(idx)];
    sum.noalias() += b.u * b.sigma.asDiagonal() * b.v.transpose();
  }
  return sum;
}

double residual_norm(const Decomposition& dec, const Matrix& x) {
  if (x.rows() != dec.n_variables || x.cols() != dec.n_samples) {
    throw std::invalid_argument("residual_norm: shape mismatch");
  }
  return (x - reconstruct(dec)).norm();
}

std::vector<double> block_residuals(const Decomposition& dec, const Matrix& x) {
  if (x.rows() != dec.n_variables || x.cols() != dec.n_samples) {
    throw std::invalid_argument("block_residuals: shape mismatch");
  }
  std::vector<double> out;
  out.reserve(dec.blocks.size());
  Matrix residual = x;
  for (const auto& b : dec.blocks) {
    const Matrix within = b.u.transpose() * residual;  // d x N
    out.push_back((within - (within * b.v) * b.v.transpose()).norm());
    residual.noalias() -= b.u * (b.u.transpose() * residual);
  }
  return out;
}

SelectionLiftReport check_selection_lift(const Matrix& x_k, const SelectionMap& sel,
                                         const DecompositionBlock& block, double rank_tol) {
  SelectionLiftReport rep{};
  const Index d = block.dim();
  const Matrix filtered = select_rows(x_k, sel);
  const SvdFactors tilde = svd_truncated(filtered, d);

  // lifted right factors stay clear of the kernel of x_k
  Eigen::BDCSVD<Matrix> full(x_k, Eigen::ComputeThinV);
  const Vector& sx = full.singularValues();
  Index rank_x = 0;
  if (sx.size() > 0 && sx(0) > 0.0) {
    const double cutoff = rank_tol * sx(0);
    while (rank_x < sx.size() && sx(rank_x) > cutoff) ++rank_x;
  }
  if (rank_x > 0) {
    const Matrix row_basis = full.matrixV().leftCols(rank_x);
    rep.kernel_residual =
        (block.v - row_basis * (row_basis.transpose() * block.v)).cwiseAbs().maxCoeff();
  } else {
    rep.kernel_residual = block.v.cwiseAbs().maxCoeff();
  }

  const Matrix filtered_u = select_rows(block.u, sel);  // S^T u, L x d
  rep.filtered_product_residual =
      (filtered_u * block.sigma.asDiagonal() * block.v.transpose() -
       tilde.u * tilde.sigma.asDiagonal() * tilde.v.transpose())
          .cwiseAbs()
          .maxCoeff();

  rep.span_residual =
      (block.v * block.v.transpose() - tilde.v * tilde.v.transpose()).cwiseAbs().maxCoeff();

  const Matrix lifted_basis = orthonormalize(filtered_u);
  rep.lifted_span_residual = (lifted_basis * lifted_basis.transpose() -
                              tilde.u * tilde.u.transpose())
                                 .cwiseAbs()
                                 .maxCoeff();

  rep.energy_slack = block.sigma.norm() - tilde.sigma.norm();

  // u^T x == sigma v^T + u^T (I - S S^T) x (I - v v^T), without forming
  // the P x P projector
  const Matrix utx = block.u.transpose() * x_k;                      // d x N
  const Matrix off_selection = utx - filtered_u.transpose() * filtered;  // u^T (I - SS^T) x
  const Matrix remainder = off_selection - (off_selection * block.v) * block.v.transpose();
  rep.remainder_residual =
      (utx - block.sigma.asDiagonal() * block.v.transpose() - remainder).cwiseAbs().maxCoeff();
  return rep;
}

double max_orthogonality_residual(const Decomposition& dec) {
  if (dec.total_dim == 0) return 0.0;
  const Matrix u = dec.concatenated_u();
  const Matrix v = dec.concatenated_v();
  const Matrix iu = u.transpose() * u - Matrix::Identity(dec.total_dim, dec.total_dim);
  const Matrix iv = v.transpose() * v - Matrix::Identity(dec.total_dim, dec.total_dim);
  return std::max(iu.cwiseAbs().maxCoeff(), iv.cwiseAbs().maxCoeff());
}

}  // namespace smssvd
