#include <cmath>

#include "accel/illposed.hpp"
#include "accel/problems.hpp"
#include "accel/vector.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace accel;
using namespace accel::illposed;
using accel::linalg::DenseMatrix;
using testing_support::rel_err;
using testing_support::Rng;

namespace {

SvdModel two_by_two() {
  SvdModel m;
  m.sigma = {2.0, 1.0};
  m.u = DenseMatrix::identity(2);
  m.v = DenseMatrix::identity(2);
  m.b = {2.0, 1.0};
  return m;
}

// s_0 = 0, s_j = x_j for the retained indices
VectorWindow tsvd_window(const SvdModel& m, int count) {
  VectorWindow w;
  w.push(Vec(m.v.rows(), 0.0));
  for (int j = 1; j < count; ++j) w.push(tsvd_solution(m, j));
  return w;
}

}  // namespace

TEST_CASE("tsvd_solution examples") {
  auto m = two_by_two();
  m.validate();
  CHECK(tsvd_solution(m, 1) == Vec{1.0, 0.0});
  CHECK(tsvd_solution(m, 2) == Vec{1.0, 1.0});
  CHECK_THROWS_AS(tsvd_solution(m, 0), std::out_of_range);
  CHECK_THROWS_AS(tsvd_solution(m, 3), std::out_of_range);

  auto o = two_by_two();
  o.b = {0.0, 3.0};
  CHECK(tsvd_solution(o, 1) == Vec{0.0, 0.0});
}

TEST_CASE("svd_model from a dense matrix gives the minimal-norm solution") {
  Rng rng(3);
  DenseMatrix a = rng.matrix(8, 5);
  Vec b = rng.vec(8);
  auto m = svd_model(a, b);
  m.validate();
  REQUIRE(m.ell() == 5);
  Vec x = tsvd_solution(m, 5);
  // normal equations AᵀA x = Aᵀb
  Vec lhs = linalg::multiply_transposed(a, linalg::multiply(a, x));
  CHECK(rel_err(lhs, linalg::multiply_transposed(a, b)) < 1e-10);

  // rank 1: the zero singular value is dropped
  DenseMatrix r1{{1, 2}, {2, 4}, {3, 6}};
  CHECK(svd_model(r1, {1, 1, 1}).ell() == 1);
}

TEST_CASE("SvdModel validation") {
  auto m = two_by_two();
  m.sigma = {1.0, 2.0};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.sigma = {2.0, 0.0};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = two_by_two();
  m.u(0, 1) = 0.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = two_by_two();
  m.b = {1.0};
  CHECK_THROWS_AS(m.validate(), DimensionError);
}

TEST_CASE("filter factors for equal coefficients") {
  auto f = filter_factors({1.0, 1.0, 1.0}, 2);
  for (double g : f.gamma) CHECK(g == doctest::Approx(1.0 / 3));
  REQUIRE(f.alpha.size() == 2);
  CHECK(f.alpha[0] == doctest::Approx(2.0 / 3));
  CHECK(f.alpha[1] == doctest::Approx(1.0 / 3));

  SvdModel m;
  m.sigma = {1.0, 1.0, 1.0};
  m.u = m.v = DenseMatrix::identity(3);
  m.b = {1.0, 1.0, 1.0};
  auto r = rre_tsvd(m, 2);
  CHECK(r.steps[1].residual_norm == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(r.steps[1].residual_norm_alt == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(rel_err(r.steps[1].t, Vec{2.0 / 3, 1.0 / 3, 0.0}) < 1e-15);
}

TEST_CASE("filter factors at k = 1") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    double d1 = rng.uniform(), d2 = rng.uniform(-5, 5);
    auto f = filter_factors({d1, d2}, 1);
    double s = 1 / (d1 * d1) + 1 / (d2 * d2);
    CHECK(f.gamma[0] == doctest::Approx(1 / (d1 * d1) / s));
    CHECK(f.gamma[1] == doctest::Approx(1 / (d2 * d2) / s));
    CHECK(f.gamma[0] + f.gamma[1] == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(filter_factors({1.0}, 1), std::out_of_range);
  CHECK_THROWS_AS(filter_factors({1.0, 0.0}, 1), std::invalid_argument);
}

TEST_CASE("filter factor normalization and monotonicity") {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    int k = rng.integer(1, 30);
    Vec d(static_cast<std::size_t>(k) + 1);
    // wide dynamic range, like δ_j on an ill-posed problem
    for (double& x : d) x = rng.uniform(-1, 1) * std::pow(10.0, rng.uniform(-8, 40));
    auto f = filter_factors(d, k);
    double s = 0;
    for (double g : f.gamma) {
      CHECK(g > 0.0);
      s += g;
    }
    CHECK(std::fabs(s - 1.0) <= 1e-13);
    CHECK(f.alpha[0] <= 1.0);
    for (std::size_t i = 0; i < f.alpha.size(); ++i) {
      CHECK(f.alpha[i] > 0.0);
      if (i > 0) CHECK(f.alpha[i] <= f.alpha[i - 1]);
    }
  }
}

TEST_CASE("both residual formulas agree") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 12;
    SvdModel m;
    m.u = testing_support::random_orthogonal(n, rng);
    m.v = testing_support::random_orthogonal(n, rng);
    for (std::size_t j = 0; j < n; ++j) m.sigma.push_back(std::exp(-0.7 * static_cast<double>(j)));
    m.b = rng.vec(n);
    auto r = rre_tsvd(m, static_cast<int>(n) - 1);
    for (const auto& s : r.steps) {
      CHECK(rel_err(s.residual_norm, s.residual_norm_alt) <= 1e-12);
      // direct: 1/√(Σ_{j≤k+1} δ_j^{−2})
      double inv = 0;
      for (int j = 0; j <= s.k; ++j) inv += 1.0 / (r.delta[static_cast<std::size_t>(j)] * r.delta[static_cast<std::size_t>(j)]);
      CHECK(rel_err(s.residual_norm, 1.0 / std::sqrt(inv)) <= 1e-12);
    }
  }
}

TEST_CASE("rre_tsvd matches generic RRE on the TSVD window") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto m = problems::illposed_synthetic(30, 0.4, 1e-3, seed);
    auto r = rre_tsvd(m, 8);
    REQUIRE(!r.renumbered);
    auto w = tsvd_window(m, 10);
    for (int k = 1; k <= 8; ++k) {
      auto g = vector::vpe_extrapolate(w, {vector::VpeKind::rre, {}}, k);
      const auto& s = r.steps[static_cast<std::size_t>(k) - 1];
      CHECK(rel_err(s.t, g.value) <= 1e-9);
      CHECK(rel_err(s.residual_norm, g.residual_norm) <= 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 80);
}

TEST_CASE("zero coefficients are skipped and flagged") {
  SvdModel m;
  m.sigma = {3.0, 2.0, 1.0, 0.5};
  m.u = m.v = DenseMatrix::identity(4);
  m.b = {1.0, 0.0, 2.0, 1.0};
  auto r = rre_tsvd(m, 2);
  CHECK(r.renumbered);
  CHECK(r.retained == std::vector<int>{1, 3, 4});
  // t uses v_1 and v_3 only
  CHECK(r.steps[1].t[1] == 0.0);
  CHECK(r.steps[1].t[2] != 0.0);
  CHECK_THROWS_AS(rre_tsvd(m, 3), std::out_of_range);
}

TEST_CASE("update_norm equals the direct difference") {
  // mild decay: the updates are not tiny next to t_k, so plain double subtraction is accurate
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = problems::illposed_synthetic(60, 0.05, 1e-2, seed);
    auto r = rre_tsvd(m, 40);
    for (int k = 1; k < 40; ++k) {
      double direct = norm2(sub(r.steps[static_cast<std::size_t>(k)].t, r.steps[static_cast<std::size_t>(k) - 1].t));
      CHECK(rel_err(update_norm(r, k), direct) <= 1e-10);
    }
    CHECK_THROWS_AS(update_norm(r, 40), std::out_of_range);
  }
}

namespace {

// t_k from the definitions, accumulated in long double.
std::vector<long double> t_long(const RreTsvdResult& r, const SvdModel& m, int k) {
  std::vector<long double> w(static_cast<std::size_t>(k) + 1);
  long double s = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    long double d = r.delta[j];
    w[j] = 1.0L / (d * d);
    s += w[j];
  }
  std::vector<long double> t(m.v.rows(), 0.0L);
  for (int i = 0; i < k; ++i) {
    long double alpha = 0;
    for (int j = i + 1; j <= k; ++j) alpha += w[static_cast<std::size_t>(j)];
    alpha /= s;
    long double c = alpha * r.delta[static_cast<std::size_t>(i)];
    for (std::size_t q = 0; q < t.size(); ++q) t[q] += c * m.v(q, static_cast<std::size_t>(r.retained[static_cast<std::size_t>(i)] - 1));
  }
  return t;
}

}  // namespace

TEST_CASE("update_norm against a long double difference on a noisy model") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto m = problems::illposed_synthetic(60, 0.3, 1e-2, seed);
    auto r = rre_tsvd(m, 40);
    for (int k = 1; k < 40; ++k) {
      auto a = t_long(r, m, k), b = t_long(r, m, k + 1);
      long double dn = 0, tn = 0;
      for (std::size_t q = 0; q < a.size(); ++q) {
        dn += (b[q] - a[q]) * (b[q] - a[q]);
        tn += b[q] * b[q];
      }
      dn = std::sqrt(dn);
      // long double still loses digits once the update is ~1e−8 of t
      if (dn < 1e-8L * std::sqrt(tn)) continue;
      CHECK(rel_err(update_norm(r, k), static_cast<double>(dn)) <= 1e-10);
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("select_truncation_index") {
  // first k with r_{k+1} >= 0.999 r_k: 0.0099 < 0.00999 at k = 3, 0.02 >= 0.00989 at k = 4
  CHECK(select_truncation_index({1, 0.1, 0.01, 0.0099, 0.02}) == 4);
  CHECK(select_truncation_index({1, 0.1, 0.01, 0.001, 1e-4}) == 5);
  CHECK(select_truncation_index({1, 1, 1, 1}) == 1);
  CHECK(select_truncation_index({1, 0.5, 0.4996}) == 2);
  CHECK_THROWS_AS(select_truncation_index({1, 0.5}), std::invalid_argument);
}

TEST_CASE("rre-tsvd error stagnates beyond the optimal truncation") {
  auto m = problems::illposed_synthetic(200, 1.0, 1e-2, 42);
  auto r = rre_tsvd(m, 60);
  int kopt = tsvd_optimal_index(m);
  REQUIRE(3 * kopt <= 60);
  double tmin = INFINITY, smin = INFINITY, smax = 0;
  for (const auto& s : r.steps) tmin = std::min(tmin, norm2(sub(s.t, *m.x_exact)));
  for (int k = 1; k <= 60; ++k) {
    double e = norm2(sub(tsvd_solution(m, k), *m.x_exact));
    smin = std::min(smin, e);
    smax = std::max(smax, e);
  }
  double tail = 0;
  for (int k = kopt + 1; k <= 3 * kopt; ++k) tail = std::max(tail, norm2(sub(r.steps[static_cast<std::size_t>(k) - 1].t, *m.x_exact)));
  CHECK(tail <= 1.5 * tmin);
  CHECK(smax >= 10 * smin);

  Vec norms;
  for (const auto& s : r.steps) norms.push_back(s.residual_norm);
  int sel = select_truncation_index(norms);
  CHECK(std::abs(sel - kopt) <= 3);
}

TEST_CASE("illposed csv export") {
  auto m = problems::illposed_synthetic(20, 0.5, 1e-2, 1);
  auto r = rre_tsvd(m, 5);
  auto csv = to_csv(m, r);
  CHECK(csv.rfind("k,residual,rel_err_tsvd,rel_err_rre\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  m.x_exact.reset();
  auto bare = to_csv(m, r);
  CHECK(bare.find(",,") != std::string::npos);
}
