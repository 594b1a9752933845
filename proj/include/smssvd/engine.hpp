#pragma once

#include <string>

#include "smssvd/restricted.hpp"
#include "smssvd/selection.hpp"

namespace smssvd {

struct EngineConfig {
  int max_components = 20;
  double min_score = 0.0;
  int null_samples = 20;
  Index d_max = 0;  // 0 resolves to min(N - 1, 20)
  std::vector<double> keep_fraction_grid;  // empty resolves to the geometric default
  double rank_tol = kDefaultRankTol;
  std::uint64_t seed = 0;
};

enum class StopReason {
  ZeroResidual,         // residual matrix negligible relative to the input
  ComponentBudget,      // max_components reached
  ScoreBelowThreshold,  // no subset scored above min_score
  SelectionInfeasible,  // no (fraction, d) candidate could be evaluated
  NumericalFailure,     // a factorization failed; decomposition is partial
};
std::string to_string(StopReason reason);

// One iteration's output: the lifted factors plus the selection that
// produced them, so variable-level provenance stays queryable.
struct DecompositionBlock {
  Matrix u;       // P x d_k
  Vector sigma;   // d_k
  Matrix v;       // N x d_k
  SelectionMap selection;
  ProjectionScoreRecord score_record;
  int iteration_index = 0;

  Index dim() const { return sigma.size(); }
};

struct Decomposition {
  std::vector<DecompositionBlock> blocks;
  Index total_dim = 0;
  Index n_variables = 0;
  Index n_samples = 0;
  StopReason stop_reason = StopReason::ZeroResidual;

  Matrix concatenated_u() const;
  Vector concatenated_sigma() const;
  Matrix concatenated_v() const;
};

// The iteration: choose a variable subset and dimension by projection
// score, lift the filtered truncated SVD to all variables through the
// restricted SVD, deflate, repeat.
Decomposition decompose(const Matrix& x, const EngineConfig& config, const Rng& rng);
Decomposition decompose(const DataMatrix& x, const EngineConfig& config, const Rng& rng);

// Sum of u_k sigma_k v_k^T over the selected blocks (all blocks if the
// subset is omitted).
Matrix reconstruct(const Decomposition& dec);
Matrix reconstruct(const Decomposition& dec, const std::vector<int>& block_subset);

// ||x - reconstruct(dec)||_F.
double residual_norm(const Decomposition& dec, const Matrix& x);

// Per-block within-span residual ||u_k^T x_k (I - v_k v_k^T)||_F, with
// x_k replayed from the deflation sequence.
std::vector<double> block_residuals(const Decomposition& dec, const Matrix& x);

// Residuals of the identities tying a block to the SVD of its filtered
// submatrix. energy_slack is ||sigma||_F - ||sigma_tilde||_F, expected
// nonnegative when the selection is a plain subset.
struct SelectionLiftReport {
  double kernel_residual;            // lifted v stays in the row space of x_k
  double filtered_product_residual;  // S^T (u sigma v^T) == filtered truncated SVD
  double span_residual;              // span(v) == span(v_tilde)
  double lifted_span_residual;       // span(S^T u) == span(u_tilde)
  double energy_slack;
  double remainder_residual;         // u^T x == sigma v^T + u^T (I-SS^T) x (I-vv^T)

  double max_identity_residual() const {
    return std::max({kernel_residual, filtered_product_residual, span_residual,
                     lifted_span_residual, remainder_residual});
  }
};

SelectionLiftReport check_selection_lift(const Matrix& x_k, const SelectionMap& sel,
                                         const DecompositionBlock& block,
                                         double rank_tol = kDefaultRankTol);

// max over blocks pairs of |U^T U - I| and |V^T V - I| entries for the
// concatenated factors.
double max_orthogonality_residual(const Decomposition& dec);

}  // namespace smssvd
