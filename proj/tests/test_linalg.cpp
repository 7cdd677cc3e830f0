#include <cmath>

#include "accel/linalg.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace accel;
using namespace accel::linalg;
using testing_support::Rng;

namespace {

double orthogonality_defect(const DenseMatrix& q) {
  DenseMatrix g = multiply(q.transpose(), q);
  return subtract(g, DenseMatrix::identity(q.cols())).max_abs();
}

}  // namespace

TEST_CASE("qr_mgs small examples") {
  auto f = qr_mgs(DenseMatrix::identity(3));
  CHECK(subtract(f.q, DenseMatrix::identity(3)).max_abs() == 0.0);
  CHECK(subtract(f.r, DenseMatrix::identity(3)).max_abs() == 0.0);

  auto g = qr_mgs(DenseMatrix{{3}, {4}});
  CHECK(g.r(0, 0) == doctest::Approx(5.0));
  CHECK(g.q(0, 0) == doctest::Approx(0.6));
  CHECK(g.q(1, 0) == doctest::Approx(0.8));

  CHECK_THROWS_AS(qr_mgs(DenseMatrix{{1, 1}, {2, 2}, {3, 3}}), RankDeficientError);
  CHECK_THROWS_AS(qr_mgs(DenseMatrix{{1, 2, 3}}), DimensionError);
}

TEST_CASE("qr_mgs orthogonality and reconstruction on random matrices") {
  Rng rng(21);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{5, 5}, {40, 10}, {200, 50}, {120, 1}}) {
    DenseMatrix a = rng.matrix(m, n);
    auto f = qr_mgs(a);
    CHECK(orthogonality_defect(f.q) <= 1e-10);
    CHECK(subtract(a, multiply(f.q, f.r)).frobenius() <= 1e-10 * a.frobenius());
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) CHECK(f.r(i, j) == 0.0);
  }
}

TEST_CASE("qr_mgs keeps orthogonality on ill-conditioned columns") {
  // columns of a Krylov-like sequence with rapidly decaying differences
  DenseMatrix a(50, 6);
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t i = 0; i < 50; ++i)
      a(i, j) = std::pow(0.3 + 0.01 * static_cast<double>(i), static_cast<double>(j));
  auto f = qr_mgs(a);
  CHECK(orthogonality_defect(f.q) <= 1e-10);
}

TEST_CASE("lu_solve examples") {
  DenseMatrix b{{1, 2}, {3, 4}};
  CHECK(subtract(lu_solve(DenseMatrix::identity(2), b), b).max_abs() == 0.0);
  auto x = lu_solve(DenseMatrix{{2, 0}, {0, 4}}, DenseMatrix{{2}, {8}});
  CHECK(x(0, 0) == doctest::Approx(1.0));
  CHECK(x(1, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(lu_solve(DenseMatrix{{1, 1}, {1, 1}}, b), SingularMatrixError);
}

TEST_CASE("lu_solve residual and growth on random systems") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix a = rng.matrix(8, 8);
    Vec xs = rng.vec(8);
    Vec rhs = multiply(a, xs);
    auto f = lu_factor(a);
    CHECK(f.growth >= 1.0);
    CHECK(f.growth < 1e3);
    DenseMatrix rb(8, 1);
    rb.set_col(0, rhs);
    Vec x = lu_solve(f, rb).col(0);
    CHECK(testing_support::rel_err(x, xs) < 1e-10);
  }
}

TEST_CASE("determinant agrees with the 2x2 and 3x3 formulas") {
  CHECK(determinant(DenseMatrix{{1, 2}, {3, 4}}) == doctest::Approx(-2.0));
  CHECK(determinant(DenseMatrix{{2, 0, 1}, {1, 3, 2}, {1, 1, 1}}) == doctest::Approx(2 * 1 - 0 + 1 * (1 - 3)));
  CHECK(determinant(DenseMatrix{{1, 1}, {1, 1}}) == 0.0);
}

TEST_CASE("least_squares examples") {
  Vec b{1, -2, 3};
  auto r = least_squares(DenseMatrix::identity(3), b);
  CHECK(r.coeffs == b);
  CHECK(r.residual_norm == 0.0);
  CHECK_FALSE(r.rank_deficient);

  auto s = least_squares(DenseMatrix{{1}, {1}}, Vec{0, 2});
  CHECK(s.coeffs[0] == doctest::Approx(1.0));
  CHECK(s.residual_norm == doctest::Approx(std::sqrt(2.0)));

  // a zero column: the minimum-norm solution leaves its coefficient at 0
  auto z = least_squares(DenseMatrix{{1, 0}, {1, 0}, {0, 0}}, Vec{1, 3, 5});
  CHECK(z.rank_deficient);
  CHECK(z.rank == 1);
  CHECK(z.coeffs[0] == doctest::Approx(2.0));
  CHECK(z.coeffs[1] == 0.0);
  CHECK(z.residual_norm == doctest::Approx(std::sqrt(1.0 + 1.0 + 25.0)));
}

TEST_CASE("least_squares rank-deficient fallback is minimum norm") {
  // duplicated column: any split of the weight fits, minimum norm splits evenly
  auto r = least_squares(DenseMatrix{{1, 1}, {2, 2}, {0, 0}}, Vec{2, 4, 1});
  CHECK(r.rank_deficient);
  CHECK(r.coeffs[0] == doctest::Approx(1.0));
  CHECK(r.coeffs[1] == doctest::Approx(1.0));
  CHECK(r.residual_norm == doctest::Approx(1.0));
}

TEST_CASE("least_squares satisfies the normal equations") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix a = rng.matrix(30, 6);
    Vec b = rng.vec(30);
    auto r = least_squares(a, b);
    Vec res = sub(b, multiply(a, r.coeffs));
    Vec g = multiply_transposed(a, res);
    CHECK(norm2(g) <= 1e-10 * a.frobenius() * norm2(b));
    CHECK(r.residual_norm == doctest::Approx(norm2(res)));
  }
}

TEST_CASE("jacobi_svd examples") {
  auto d = jacobi_svd(DenseMatrix{{3, 0}, {0, 1}});
  CHECK(d.sigma[0] == doctest::Approx(3.0));
  CHECK(d.sigma[1] == doctest::Approx(1.0));
  CHECK(std::fabs(d.u(0, 0)) == doctest::Approx(1.0));
  CHECK(std::fabs(d.v(1, 1)) == doctest::Approx(1.0));

  auto a = jacobi_svd(DenseMatrix{{0, 2}, {1, 0}});
  CHECK(a.sigma[0] == doctest::Approx(2.0));
  CHECK(a.sigma[1] == doctest::Approx(1.0));

  auto z = jacobi_svd(DenseMatrix(3, 2));
  CHECK(z.sigma[0] == 0.0);
  CHECK(z.sigma[1] == 0.0);
  CHECK(orthogonality_defect(z.u) <= 1e-12);
}

TEST_CASE("jacobi_svd singular values match the symmetric eigen oracle") {
  Rng rng(24);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{6, 6}, {20, 8}, {40, 12}}) {
    DenseMatrix a = rng.matrix(m, n);
    auto f = jacobi_svd(a);
    Vec ev = testing_support::symmetric_eigenvalues(multiply(a.transpose(), a));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(testing_support::rel_err(f.sigma[i], std::sqrt(std::max(ev[i], 0.0))) <= 1e-9);
      if (i > 0) CHECK(f.sigma[i] <= f.sigma[i - 1]);
    }
    CHECK(orthogonality_defect(f.u) <= 1e-10);
    CHECK(orthogonality_defect(f.v) <= 1e-10);
    DenseMatrix us = f.u;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) us(i, j) *= f.sigma[j];
    CHECK(subtract(a, multiply(us, f.v.transpose())).frobenius() <= 1e-9 * a.frobenius());
  }
}

TEST_CASE("jacobi_svd reports non-convergence") {
  Rng rng(25);
  DenseMatrix a = rng.matrix(10, 10);
  CHECK_THROWS_AS(jacobi_svd(a, 1e-14, 1), ConvergenceError);
}

TEST_CASE("gmres_oracle examples") {
  auto ident = [](const Vec& x) { return x; };
  auto r = gmres_oracle(ident, Vec{1, 2, 3}, 3);
  CHECK(r.exact);
  CHECK(r.residual_norms.size() == 2);
  CHECK(r.residual_norms[1] == 0.0);

  auto diag = [](const Vec& x) { return Vec{x[0], 2 * x[1]}; };
  auto d = gmres_oracle(diag, Vec{1, 1}, 2);
  CHECK(d.residual_norms.back() <= 1e-14);
}

TEST_CASE("gmres_oracle residuals are non-increasing on SPD systems") {
  Rng rng(26);
  DenseMatrix g = rng.matrix(10, 10);
  DenseMatrix a = multiply(g.transpose(), g);
  for (std::size_t i = 0; i < 10; ++i) a(i, i) += 1.0;
  auto r = gmres_oracle([&](const Vec& x) { return multiply(a, x); }, rng.vec(10), 10);
  for (std::size_t j = 1; j < r.residual_norms.size(); ++j)
    CHECK(r.residual_norms[j] <= r.residual_norms[j - 1] + 1e-12);
  CHECK(r.residual_norms.back() <= 1e-8 * r.residual_norms.front());
}

TEST_CASE("gmres_oracle residuals match a direct Krylov least-squares solve") {
  Rng rng(27);
  DenseMatrix a = rng.matrix(12, 12);
  for (std::size_t i = 0; i < 12; ++i) a(i, i) += 6.0;
  Vec b = rng.vec(12);
  auto r = gmres_oracle([&](const Vec& x) { return multiply(a, x); }, b, 5);
  std::vector<Vec> kry{b};
  for (int j = 1; j <= 5; ++j) {
    // min ‖b − A K_j y‖ with the raw Krylov basis
    std::vector<Vec> aks;
    for (const auto& v : kry) aks.push_back(multiply(a, v));
    auto ls = least_squares(DenseMatrix::from_columns(aks), b);
    CHECK(testing_support::rel_err(ls.residual_norm, r.residual_norms[static_cast<std::size_t>(j)]) < 1e-7);
    kry.push_back(multiply(a, kry.back()));
  }
}
