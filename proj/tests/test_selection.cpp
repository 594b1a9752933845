#include "doctest.h"
#include "smssvd/selection.hpp"
#include "test_support.hpp"

#include <numeric>
#include <stdexcept>

using namespace smssvd;
using testutil::random_matrix;

TEST_SUITE("variable_selection") {

TEST_CASE("variance filter keeps the requested top fraction") {
  SUBCASE("keep everything") {
    Rng rng(1);
    const Matrix x = random_matrix(7, 5, rng);
    CHECK(variance_filter(x, 1.0).size() == 7);
  }
  SUBCASE("keeps the largest-variance row") {
    Matrix x(3, 4);
    x << 2, -2, 2, -2,   // variance 16/3
        1, -1, 1, -1,    // variance 4/3
        3, -3, 3, -3;    // variance 12
    const SelectionMap sel = variance_filter(x, 1.0 / 3.0);
    REQUIRE(sel.size() == 1);
    CHECK(sel.kept_indices[0] == 2);
  }
  SUBCASE("fraction times count lands exactly on integers") {
    Rng rng(2);
    const Matrix x = random_matrix(100, 20, rng);
    const SelectionMap sel = variance_filter(x, 0.1);
    REQUIRE(sel.size() == 10);

    // sort oracle: min kept variance >= max dropped variance
    Vector variance(100);
    for (Index i = 0; i < 100; ++i) {
      const double mean = x.row(i).mean();
      variance(i) = (x.row(i).array() - mean).square().sum() / 19.0;
    }
    double min_kept = std::numeric_limits<double>::infinity();
    std::vector<bool> kept(100, false);
    for (Index i : sel.kept_indices) {
      kept[static_cast<size_t>(i)] = true;
      min_kept = std::min(min_kept, variance(i));
    }
    double max_dropped = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < 100; ++i) {
      if (!kept[static_cast<size_t>(i)]) max_dropped = std::max(max_dropped, variance(i));
    }
    CHECK(min_kept >= max_dropped);
  }
  SUBCASE("indices are strictly increasing") {
    Rng rng(3);
    const Matrix x = random_matrix(50, 8, rng);
    const SelectionMap sel = variance_filter(x, 0.4);
    for (size_t i = 1; i < sel.kept_indices.size(); ++i) {
      CHECK(sel.kept_indices[i] > sel.kept_indices[i - 1]);
    }
  }
  SUBCASE("ties break to the lower row index") {
    Matrix x(3, 3);
    x << 1, 2, 3,
        1, 2, 3,
        0, 0, 0;
    const SelectionMap sel = variance_filter(x, 1.0 / 3.0);
    REQUIRE(sel.size() == 1);
    CHECK(sel.kept_indices[0] == 0);
  }
}

TEST_CASE("variance filter input validation") {
  Rng rng(4);
  const Matrix one_sample = random_matrix(5, 1, rng);
  CHECK_THROWS_AS((void)variance_filter(one_sample, 0.5), std::invalid_argument);
  const Matrix x = random_matrix(5, 4, rng);
  CHECK_THROWS_AS((void)variance_filter(x, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)variance_filter(x, 1.5), std::invalid_argument);
}

TEST_CASE("tau saturates at one for exact low rank") {
  Rng rng(5);
  const Matrix x = random_matrix(30, 3, rng) * random_matrix(3, 12, rng);  // rank 3
  SelectionMap all;
  all.kept_indices.resize(30);
  std::iota(all.kept_indices.begin(), all.kept_indices.end(), Index{0});
  const auto rec = projection_score(x, all, 3, Rng(77), 5);
  CHECK(rec.tau_observed == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("tau is exactly one at the full dimension and the score collapses") {
  Rng rng(6);
  const Matrix x = random_matrix(20, 8, rng);
  SelectionMap all;
  all.kept_indices.resize(20);
  std::iota(all.kept_indices.begin(), all.kept_indices.end(), Index{0});
  const auto rec = projection_score(x, all, 8, Rng(78), 5);
  CHECK(rec.tau_observed == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rec.tau_null_mean == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rec.score == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gaussian data scores near zero on average") {
  // Monte Carlo oracle: the mean score over independent gaussian matrices
  // should sit within 3 standard errors of zero.
  const int runs = 40;
  const int null_samples = 25;
  std::vector<double> scores;
  for (int r = 0; r < runs; ++r) {
    Rng rng(1000 + r);
    const Matrix x = random_matrix(24, 16, rng);
    SelectionMap all;
    all.kept_indices.resize(24);
    std::iota(all.kept_indices.begin(), all.kept_indices.end(), Index{0});
    scores.push_back(projection_score(x, all, 3, Rng(2000 + r), null_samples).score);
  }
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= runs;
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / (runs - 1));
  CHECK(std::abs(mean) < 3.0 * sd / std::sqrt(static_cast<double>(runs)) + 1e-12);
}

TEST_CASE("tau is monotone in d and bounded by one") {
  Rng rng(8);
  const Matrix x = random_matrix(15, 10, rng);
  SelectionMap sel = variance_filter(x, 0.8);
  double prev = 0.0;
  for (Index d = 1; d <= 10; ++d) {
    const auto rec = projection_score(x, sel, d, Rng(5), 2);
    CHECK(rec.tau_observed >= prev);
    CHECK(rec.tau_observed <= 1.0 + 1e-12);
    CHECK(rec.tau_observed > 0.0);
    CHECK(rec.score == rec.tau_observed - rec.tau_null_mean);
    prev = rec.tau_observed;
  }
}

TEST_CASE("score is invariant under sample permutation") {
  Rng rng(9);
  const Matrix x = random_matrix(18, 9, rng);
  Matrix permuted(18, 9);
  const std::vector<int> perm{4, 7, 1, 0, 8, 2, 6, 3, 5};
  for (Index j = 0; j < 9; ++j) permuted.col(j) = x.col(perm[static_cast<size_t>(j)]);
  const SelectionMap sel = variance_filter(x, 0.5);
  const SelectionMap sel_p = variance_filter(permuted, 0.5);
  REQUIRE(sel.kept_indices == sel_p.kept_indices);  // row variances unchanged
  const auto a = projection_score(x, sel, 3, Rng(11), 10);
  const auto b = projection_score(permuted, sel_p, 3, Rng(11), 10);
  CHECK(a.tau_observed == doctest::Approx(b.tau_observed).epsilon(1e-9));
  CHECK(a.score == doctest::Approx(b.score).epsilon(1e-9));
}

TEST_CASE("score is invariant under variable permutation") {
  Rng rng(10);
  const Matrix x = random_matrix(12, 8, rng);
  std::vector<Index> perm(12);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::swap(perm[0], perm[9]);
  std::swap(perm[3], perm[11]);
  Matrix permuted(12, 8);
  for (Index i = 0; i < 12; ++i) permuted.row(perm[static_cast<size_t>(i)]) = x.row(i);
  const auto a = projection_score(x, variance_filter(x, 0.5), 2, Rng(13), 10);
  const auto b = projection_score(permuted, variance_filter(permuted, 0.5), 2, Rng(13), 10);
  CHECK(a.tau_observed == doctest::Approx(b.tau_observed).epsilon(1e-9));
  CHECK(a.score == doctest::Approx(b.score).epsilon(1e-9));
}

TEST_CASE("projection score rejects invalid input") {
  Rng rng(11);
  const Matrix x = random_matrix(10, 6, rng);
  SelectionMap sel = variance_filter(x, 0.5);
  CHECK_THROWS_AS((void)projection_score(x, sel, 0, Rng(1), 5), std::invalid_argument);
  CHECK_THROWS_AS((void)projection_score(x, sel, 7, Rng(1), 5), std::invalid_argument);
  CHECK_THROWS_AS((void)projection_score(x, sel, 2, Rng(1), 0), std::invalid_argument);
  const Matrix zero = Matrix::Zero(10, 6);
  SelectionMap some{{0, 1, 2}};
  CHECK_THROWS_AS((void)projection_score(zero, some, 1, Rng(1), 5), std::runtime_error);
}

TEST_CASE("optimizer finds a planted rank-1 signal") {
  Rng rng(12);
  Matrix x = Matrix::Zero(1000, 30);
  const Vector u = random_matrix(10, 1, rng).col(0);
  const Vector v = random_matrix(30, 1, rng).col(0);
  x.topRows(10) = u * v.transpose();

  const auto grid = default_keep_fraction_grid(1000, 5);
  const auto choice = optimize_selection(x, grid, 5, Rng(99), 10);
  CHECK(choice.dim == 1);
  for (Index i = 0; i < 10; ++i) {
    CHECK(std::find(choice.selection.kept_indices.begin(), choice.selection.kept_indices.end(),
                    i) != choice.selection.kept_indices.end());
  }

  // exhaustive oracle: same argmax by scanning every (fraction, d) pair
  bool found = false;
  ProjectionScoreRecord best;
  Index best_l = 0;
  const Rng base(99);
  for (size_t fi = 0; fi < grid.size(); ++fi) {
    const SelectionMap sel = variance_filter(x, grid[fi]);
    for (Index d = 1; d <= std::min<Index>(5, std::min(sel.size(), x.cols())); ++d) {
      auto rec = projection_score(x, sel, d, base.substream(fi), 10);
      rec.threshold_quantile = grid[fi];
      const bool better = !found || rec.score > best.score ||
                          (rec.score == best.score &&
                           (sel.size() > best_l || (sel.size() == best_l && d < best.dim)));
      if (better) {
        best = rec;
        best_l = sel.size();
        found = true;
      }
    }
  }
  CHECK(choice.record.score == doctest::Approx(best.score).epsilon(1e-12));
  CHECK(choice.record.kept == best_l);
  CHECK(choice.record.dim == best.dim);
}

TEST_CASE("single-candidate grid returns the full selection") {
  Rng rng(13);
  const Matrix x = random_matrix(25, 10, rng);
  const auto choice = optimize_selection(x, {1.0}, 1, Rng(1), 5);
  CHECK(choice.selection.size() == 25);
  CHECK(choice.dim == 1);
  CHECK(choice.record.threshold_quantile == 1.0);
}

TEST_CASE("filtering beats no filtering on a sparse planted signal") {
  Rng rng(14);
  SelectionMap support;
  Matrix x(5000, 50);
  for (Index j = 0; j < 50; ++j) {
    for (Index i = 0; i < 5000; ++i) x(i, j) = 0.02 * rng.gaussian();
  }
  const Vector u = random_matrix(64, 1, rng).col(0).normalized() * 3.0;
  const Vector v = random_matrix(50, 1, rng).col(0).normalized();
  x.topRows(64) += u * v.transpose();

  const auto grid = default_keep_fraction_grid(5000, 10);
  const auto choice = optimize_selection(x, grid, 10, Rng(7), 5);
  CHECK(choice.record.threshold_quantile < 1.0);

  // endpoint oracle: the full selection scores lower
  SelectionMap all = variance_filter(x, 1.0);
  const auto full_rec = projection_score(x, all, choice.dim, Rng(7).substream(0), 5);
  CHECK(choice.record.score > full_rec.score);
}

TEST_CASE("optimizer is deterministic") {
  Rng rng(15);
  const Matrix x = random_matrix(60, 12, rng);
  const auto grid = default_keep_fraction_grid(60, 4);
  const auto a = optimize_selection(x, grid, 4, Rng(3), 8);
  const auto b = optimize_selection(x, grid, 4, Rng(3), 8);
  CHECK(a.dim == b.dim);
  CHECK(a.selection.kept_indices == b.selection.kept_indices);
  CHECK(a.record.score == b.record.score);
  CHECK(a.record.tau_observed == b.record.tau_observed);
  CHECK(a.record.tau_null_mean == b.record.tau_null_mean);
}

TEST_CASE("default grid keeps enough variables for the search") {
  const auto grid = default_keep_fraction_grid(5000, 20);
  CHECK(grid.front() == 1.0);
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] == grid[i - 1] / 2.0);
  CHECK(std::ceil(grid.back() * 5000.0 - 1e-9) >= 21);
  CHECK(std::ceil(grid.back() / 2.0 * 5000.0 - 1e-9) < 21);
}

}  // TEST_SUITE
