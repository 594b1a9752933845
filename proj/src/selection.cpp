#include "smssvd/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace smssvd {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      g(i, j) = rng.gaussian();
    }
  }
  return g;
}

// tau_d from a descending singular value vector, for every d in 1..len.
std::vector<double> tau_profile(const Vector& sv) {
  std::vector<double> tau(sv.size());
  double total = 0.0;
  for (Index i = 0; i < sv.size(); ++i) total += sv(i) * sv(i);
  double partial = 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    partial += sv(i) * sv(i);
    tau[static_cast<size_t>(i)] = total > 0.0 ? std::sqrt(partial / total) : 0.0;
  }
  return tau;
}

}  // namespace

Matrix select_rows(const Matrix& x, const SelectionMap& sel) {
  Matrix out(sel.size(), x.cols());
  for (Index i = 0; i < sel.size(); ++i) {
    const Index row = sel.kept_indices[static_cast<size_t>(i)];
    if (row < 0 || row >= x.rows()) throw std::invalid_argument("selection index out of range");
    out.row(i) = x.row(row);
  }
  return out;
}

SelectionMap variance_filter(const Matrix& x, double keep_fraction) {
  const Index p = x.rows();
  const Index n = x.cols();
  if (n < 2) throw std::invalid_argument("variance_filter: need at least 2 samples");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw std::invalid_argument("variance_filter: keep_fraction must be in (0, 1]");
  }
  // Guard against 0.1 * 100 = 10.000000000000002 style ceil overshoot.
  const Index keep = std::max<Index>(
      1, static_cast<Index>(std::ceil(keep_fraction * static_cast<double>(p) - 1e-9)));

  Vector variance(p);
  for (Index i = 0; i < p; ++i) {
    const double mean = x.row(i).mean();
    variance(i) = (x.row(i).array() - mean).square().sum() / static_cast<double>(n - 1);
  }

  std::vector<Index> order(static_cast<size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (variance(a) != variance(b)) return variance(a) > variance(b);
    return a < b;
  });
  order.resize(static_cast<size_t>(std::min(keep, p)));
  std::sort(order.begin(), order.end());
  return SelectionMap{std::move(order)};
}

SelectionMap variance_filter(const DataMatrix& x, double keep_fraction) {
  return variance_filter(x.values, keep_fraction);
}

ProjectionScoreRecord projection_score(const Matrix& x, const SelectionMap& sel, Index d,
                                       Rng rng, int null_samples) {
  const Index l = sel.size();
  const Index n = x.cols();
  if (d < 1 || d > std::min(l, n)) {
    throw std::invalid_argument("projection_score: d out of range [1, min(L, N)]");
  }
  if (null_samples < 1) throw std::invalid_argument("projection_score: null_samples must be >= 1");

  const Matrix filtered = select_rows(x, sel);
  const Vector sv = singular_values_gram(filtered);
  if (sv(0) == 0.0) throw std::runtime_error("projection_score: selected submatrix is zero");
  const auto tau_obs = tau_profile(sv);

  double null_sum = 0.0;
  for (int s = 0; s < null_samples; ++s) {
    const Matrix g = gaussian_matrix(l, n, rng);
    const auto tau_null = tau_profile(singular_values_gram(g));
    null_sum += tau_null[static_cast<size_t>(d - 1)];
  }

  ProjectionScoreRecord rec;
  rec.threshold_quantile = static_cast<double>(l) / static_cast<double>(x.rows());
  rec.kept = l;
  rec.dim = d;
  rec.tau_observed = tau_obs[static_cast<size_t>(d - 1)];
  rec.tau_null_mean = null_sum / null_samples;
  rec.score = rec.tau_observed - rec.tau_null_mean;
  rec.null_samples = null_samples;
  return rec;
}

std::vector<double> default_keep_fraction_grid(Index p, Index d_max) {
  const double min_keep = static_cast<double>(std::max<Index>(10, d_max + 1));
  std::vector<double> grid{1.0};
  double f = 0.5;
  while (std::ceil(f * static_cast<double>(p) - 1e-9) >= min_keep) {
    grid.push_back(f);
    f *= 0.5;
  }
  return grid;
}

SelectionChoice optimize_selection(const Matrix& x, const std::vector<double>& grid,
                                   Index d_max, const Rng& rng, int null_samples) {
  if (grid.empty()) throw std::invalid_argument("optimize_selection: empty grid");
  if (d_max < 1) throw std::invalid_argument("optimize_selection: d_max must be >= 1");
  const Index n = x.cols();

  bool found = false;
  SelectionChoice best;
  for (size_t fi = 0; fi < grid.size(); ++fi) {
    SelectionMap sel;
    try {
      sel = variance_filter(x, grid[fi]);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const Index l = sel.size();
    const Index d_cap = std::min({d_max, l, n});
    if (d_cap < 1) continue;

    const Matrix filtered = select_rows(x, sel);
    const Vector sv = singular_values_gram(filtered);
    if (sv(0) == 0.0) continue;
    const auto tau_obs = tau_profile(sv);

    // Null spectra are shared over d for this fraction; equivalent to
    // calling projection_score per d with the same substream.
    Rng sub = rng.substream(static_cast<std::uint64_t>(fi));
    std::vector<std::vector<double>> tau_null(static_cast<size_t>(null_samples));
    for (int s = 0; s < null_samples; ++s) {
      const Matrix g = gaussian_matrix(l, n, sub);
      tau_null[static_cast<size_t>(s)] = tau_profile(singular_values_gram(g));
    }

    for (Index d = 1; d <= d_cap; ++d) {
      double null_sum = 0.0;
      for (int s = 0; s < null_samples; ++s) {
        null_sum += tau_null[static_cast<size_t>(s)][static_cast<size_t>(d - 1)];
      }
      ProjectionScoreRecord rec;
      rec.threshold_quantile = grid[fi];
      rec.kept = l;
      rec.dim = d;
      rec.tau_observed = tau_obs[static_cast<size_t>(d - 1)];
      rec.tau_null_mean = null_sum / null_samples;
      rec.score = rec.tau_observed - rec.tau_null_mean;
      rec.null_samples = null_samples;

      const bool better =
          !found || rec.score > best.record.score ||
          (rec.score == best.record.score &&
           (l > best.record.kept || (l == best.record.kept && d < best.record.dim)));
      if (better) {
        best.selection = sel;
        best.dim = d;
        best.record = rec;
        found = true;
      }
    }
  }
  if (!found) throw std::runtime_error("optimize_selection: no feasible (fraction, d) pair");
  return best;
}

}  // namespace smssvd
