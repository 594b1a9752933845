#include "doctest.h"
#include "smssvd/restricted.hpp"
#include "test_support.hpp"

#include <stdexcept>

using namespace smssvd;
using testutil::oracle_singular_values;
using testutil::random_matrix;

namespace {

Matrix random_low_rank(Index p, Index n, Index rank, Rng& rng) {
  return random_matrix(p, rank, rng) * random_matrix(rank, n, rng);
}

}  // namespace

TEST_SUITE("restricted_svd") {

TEST_CASE("basis validation") {
  Rng rng(1);
  CHECK_THROWS_AS((void)make_subspace_basis(2.0 * random_matrix(6, 2, rng)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)make_subspace_basis(Matrix(6, 0)), std::invalid_argument);
  const Matrix q = orthonormalize(random_matrix(6, 3, rng));
  CHECK_NOTHROW((void)make_subspace_basis(q));
}

TEST_CASE("orthonormalize returns an orthonormal basis spanning the input") {
  Rng rng(2);
  const Matrix m = random_matrix(9, 4, rng);
  const Matrix q = orthonormalize(m);
  CHECK((q.transpose() * q - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  // every input column is reproduced by the projector
  CHECK((m - q * (q.transpose() * m)).cwiseAbs().maxCoeff() < 1e-10 * m.norm());
}

TEST_CASE("restriction to the top right singular subspace is the truncated svd") {
  Rng rng(3);
  const Matrix x = random_matrix(14, 9, rng);
  const SvdFactors truncated = svd_truncated(x, 3);
  const SvdFactors restricted = restrict_svd(x, make_subspace_basis(truncated.v));
  CHECK((restricted.sigma - truncated.sigma).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((restricted.u - truncated.u).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((restricted.v - truncated.v).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("restriction to the full row space recovers the whole svd") {
  Rng rng(4);
  const Index rank = 4;
  const Matrix x = random_low_rank(12, 10, rank, rng);
  const SvdFactors row_space = svd_truncated(x, rank);  // basis of (ker x)-perp
  const SvdFactors f = restrict_svd(x, make_subspace_basis(row_space.v));
  const auto oracle = oracle_singular_values(x);
  for (Index i = 0; i < rank; ++i) {
    CHECK(f.sigma(i) == doctest::Approx(oracle[static_cast<size_t>(i)]).epsilon(1e-9));
  }
  // nothing of x is left outside the captured subspace
  const Matrix deflated = project_complement(x, f.u);
  CHECK(numerical_rank(deflated) == 0);
  CHECK((x - f.u * f.sigma.asDiagonal() * f.v.transpose()).norm() < 1e-9 * x.norm());
}

TEST_CASE("identities hold on random subspaces") {
  Rng rng(5);
  const Matrix x = random_matrix(20, 10, rng);
  const Matrix basis = orthonormalize(random_matrix(10, 3, rng));
  const SvdFactors f = restrict_svd(x, make_subspace_basis(basis));
  const RestrictionReport rep = check_restriction(x, f);
  CHECK(rep.max_identity_residual() < 1e-8 * x.norm());
  CHECK(rep.rank_gap == 0.0);
  CHECK(rep.residuals().size() == 7);
  CHECK(rep.residuals()[5] == rep.residuals()[6]);

  // captured span matches the requested one
  CHECK((f.v * f.v.transpose() - basis * basis.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  // deflation annihilates the captured block
  const Matrix block = f.u * f.sigma.asDiagonal() * f.v.transpose();
  CHECK(project_complement(block, f.u).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("left identity simplifies when the subspace is the top singular one") {
  Rng rng(6);
  const Matrix x = random_matrix(16, 8, rng);
  const SvdFactors f = restrict_svd(x, make_subspace_basis(svd_truncated(x, 3).v));
  const Matrix lhs = f.u.transpose() * x - f.sigma.asDiagonal() * f.v.transpose();
  CHECK(lhs.cwiseAbs().maxCoeff() < 1e-8 * x.norm());
}

TEST_CASE("zero-padded rank-1 matrix deflates to rank zero") {
  Rng rng(7);
  Matrix x = Matrix::Zero(12, 8);
  const Vector u = random_matrix(4, 1, rng).col(0);
  const Vector v = random_matrix(8, 1, rng).col(0);
  x.topRows(4) = u * v.transpose();
  const SvdFactors top = svd_truncated(x, 1);
  const SvdFactors f = restrict_svd(x, make_subspace_basis(top.v));
  const RestrictionReport rep = check_restriction(x, f);
  CHECK(rep.rank_deflated == 0);
  CHECK(rep.rank_x == 1);
  CHECK(rep.rank_gap == 0.0);
}

TEST_CASE("rank identity holds across random cases") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = 6 + static_cast<Index>(rng.uniform() * 20);
    const Index n = 4 + static_cast<Index>(rng.uniform() * 12);
    const Index d = 1 + static_cast<Index>(rng.uniform() * std::min<Index>(4, n - 1));
    const Matrix x = random_matrix(p, n, rng);
    const Matrix basis = orthonormalize(random_matrix(n, d, rng));
    const SvdFactors f = restrict_svd(x, make_subspace_basis(basis));
    const Matrix deflated = project_complement(x, f.u);
    CHECK(numerical_rank(x) == d + numerical_rank(deflated));
  }
}

TEST_CASE("subspaces that meet the kernel are rejected") {
  Rng rng(9);
  const Matrix x = random_low_rank(8, 6, 2, rng);  // 4-dim kernel
  const Matrix basis = orthonormalize(random_matrix(6, 4, rng));
  CHECK_THROWS_AS((void)restrict_svd(x, make_subspace_basis(basis)), std::runtime_error);

  const Matrix wide = random_matrix(5, 4, rng);
  CHECK_THROWS_AS((void)restrict_svd(wide, make_subspace_basis(Matrix::Identity(6, 2))),
                  std::invalid_argument);
}

}  // TEST_SUITE
