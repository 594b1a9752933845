#pragma once

#include <vector>

#include "smssvd/linalg.hpp"
#include "smssvd/rng.hpp"

namespace smssvd {

// Variable subset in column-selection form: row indices, strictly
// increasing, so the implied selection matrix S has S^T S = I.
struct SelectionMap {
  std::vector<Index> kept_indices;

  Index size() const { return static_cast<Index>(kept_indices.size()); }
};

// Rows of x at the kept indices (the filtered matrix S^T x).
Matrix select_rows(const Matrix& x, const SelectionMap& sel);

// Keeps the ceil(keep_fraction * P) rows of largest sample variance
// (denominator N-1), ties to the lower row index. Throws if N < 2 or
// keep_fraction is outside (0, 1].
SelectionMap variance_filter(const Matrix& x, double keep_fraction);
SelectionMap variance_filter(const DataMatrix& x, double keep_fraction);

// How informative a variable subset is for a rank-d approximation,
// relative to a same-shape i.i.d. gaussian null.
struct ProjectionScoreRecord {
  double threshold_quantile = 1.0;  // keep fraction that produced the subset
  Index kept = 0;                   // L
  Index dim = 0;                    // d
  double tau_observed = 0.0;        // sqrt(sum_{i<=d} s_i^2 / sum_i s_i^2)
  double tau_null_mean = 0.0;
  double score = 0.0;               // tau_observed - tau_null_mean
  int null_samples = 0;
};

// tau of the filtered matrix minus the mean tau of null_samples gaussian
// matrices of the same shape drawn from rng. Deterministic given the rng
// seed; the rng is taken by value so repeated calls with the same stream
// replay the same nulls.
ProjectionScoreRecord projection_score(const Matrix& x, const SelectionMap& sel, Index d,
                                       Rng rng, int null_samples);

struct SelectionChoice {
  SelectionMap selection;
  Index dim = 0;
  ProjectionScoreRecord record;
};

// Geometric grid 1, 1/2, 1/4, ... stopping at the largest fraction that
// keeps at least max(10, d_max + 1) variables.
std::vector<double> default_keep_fraction_grid(Index p, Index d_max);

// Maximizes the projection score over (keep_fraction in grid, d in
// 1..min(d_max, L, N)). Ties go to larger subsets, then smaller d.
// Each fraction uses the substream rng.substream(fraction index), so the
// search order does not matter. Throws if no pair is feasible.
SelectionChoice optimize_selection(const Matrix& x, const std::vector<double>& grid,
                                   Index d_max, const Rng& rng, int null_samples);

}  // namespace smssvd
