#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "accel/driver.hpp"
#include "accel/illposed.hpp"
#include "accel/problems.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace accel;
using namespace accel::problems;
using accel::linalg::DenseMatrix;
using testing_support::rel_err;
using testing_support::Rng;

TEST_CASE("series_generator examples") {
  auto w = series_generator("log2", 3);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.5));
  CHECK(w[2] == doctest::Approx(0.8333333333));

  SeriesParams lp;
  lp.limit = 0.0;
  auto l = series_generator("logseq", 2, lp);
  CHECK(l[0] == 1.0);
  CHECK(l[1] == 0.5);

  auto g = series_generator("geom", 3);
  CHECK(g[0] == doctest::Approx(5.0));
  CHECK(g[1] == doctest::Approx(3.5));
  CHECK(g[2] == doctest::Approx(2.75));

  auto p = series_generator("leibniz", 3);
  CHECK(p[2] == doctest::Approx(4.0 * (1.0 - 1.0 / 3 + 1.0 / 5)));
  CHECK(series_limit("leibniz_pi") == doctest::Approx(std::numbers::pi));
  CHECK(series_limit("log2") == doctest::Approx(std::log(2.0)));

  CHECK_THROWS_AS(series_generator("harmonic", 3), std::invalid_argument);
  CHECK_THROWS_AS(series_generator("log2", 0), std::invalid_argument);
}

TEST_CASE("series partial sums approach their limits") {
  auto w = series_generator("log2", 2001);
  CHECK(std::fabs(w[2000] - std::log(2.0)) < 1e-3);
  auto p = series_generator("leibniz", 2001);
  CHECK(std::fabs(p[2000] - std::numbers::pi) < 1e-2);
}

TEST_CASE("linear generator: scalar case and contraction rate") {
  auto one = linear_iteration_generator(1, 0.5, 7);
  CHECK(std::fabs(one.b_mat(0, 0)) == doctest::Approx(0.5));
  CHECK(one.apply(one.xstar)[0] == doctest::Approx(one.xstar[0]));

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto li = linear_iteration_generator(60, 0.8, seed);
    auto w = li.iterate(Vec(60, 0.0), 61);
    for (int n = 50; n < 60; ++n) {
      double r = norm2(sub(w.at(n + 1), li.xstar)) / norm2(sub(w.at(n), li.xstar));
      CHECK(r >= 0.7);
      CHECK(r <= 0.9);
    }
  }
  CHECK_THROWS_AS(linear_iteration_generator(5, 1.0, 1), std::invalid_argument);
}

TEST_CASE("linear generator is deterministic under seed") {
  auto a = linear_iteration_generator(20, 0.9, 11);
  auto b = linear_iteration_generator(20, 0.9, 11);
  auto c = linear_iteration_generator(20, 0.9, 12);
  CHECK(a.b_mat.data() == b.b_mat.data());
  CHECK(a.b == b.b);
  CHECK(a.b_mat.data() != c.b_mat.data());
  // b = (I − B)x*
  CHECK(rel_err(a.apply(a.xstar), a.xstar) < 1e-14);
}

TEST_CASE("linear_iteration_with_spectrum has the requested eigenvalues") {
  Vec eigs{0.9, -0.5, 0.3, 0.1};
  auto li = linear_iteration_with_spectrum(eigs, 3);
  auto got = testing_support::symmetric_eigenvalues(li.b_mat);
  std::sort(eigs.begin(), eigs.end(), std::greater<>());
  for (std::size_t i = 0; i < eigs.size(); ++i) CHECK(got[i] == doctest::Approx(eigs[i]).epsilon(1e-10));
  CHECK(li.spectral_radius == 0.9);
  auto q = random_orthogonal(6, 5);
  CHECK(linalg::subtract(linalg::multiply(q.transpose(), q), DenseMatrix::identity(6)).max_abs() < 1e-12);
}

TEST_CASE("laplacian applicator matches the assembled 5-point matrix") {
  const std::size_t p = 6, n = p * p;
  const double h = 1.0 / (p + 1);
  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) {
      std::size_t r = i + p * j;
      a(r, r) = 4.0 / (h * h);
      if (i > 0) a(r, r - 1) = -1.0 / (h * h);
      if (i + 1 < p) a(r, r + 1) = -1.0 / (h * h);
      if (j > 0) a(r, r - p) = -1.0 / (h * h);
      if (j + 1 < p) a(r, r + p) = -1.0 / (h * h);
    }
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    Vec u = rng.vec(n);
    CHECK(rel_err(apply_laplacian(p, u), linalg::multiply(a, u)) < 1e-14);
  }
  CHECK_THROWS_AS(apply_laplacian(p, Vec(5)), DimensionError);
}

TEST_CASE("reaction_diffusion: manufactured solution and contraction") {
  auto prob = reaction_diffusion(20);
  REQUIRE(prob.exact);
  CHECK(norm_inf(prob.residual(*prob.exact)) < 1e-12);
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    Vec d = rng.vec(prob.dim);
    d = scaled(d, 1e-3 / norm2(d));
    Vec g = prob.map(add(*prob.exact, d));
    CHECK(norm2(sub(g, *prob.exact)) < norm2(d));
  }
  CHECK(reaction_diffusion(80).dim == 6400);
  CHECK_THROWS_AS(reaction_diffusion(2), std::invalid_argument);
}

TEST_CASE("fredholm discretization") {
  auto d = fredholm_discretization(5, 0.5);
  CHECK(d.w[0] == doctest::Approx(0.125));
  CHECK(d.w[4] == doctest::Approx(0.125));
  CHECK(d.w[2] == doctest::Approx(0.25));
  CHECK(d.x[4] == 1.0);
  CHECK(d.k(1, 3) == doctest::Approx(std::exp(-0.5)));
  CHECK_THROWS_AS(fredholm_discretization(1, 0.5), std::invalid_argument);
}

TEST_CASE("fredholm with lambda 0 is solved after one step") {
  auto prob = fredholm(50, 0.0);
  Vec u = prob.map(prob.initial);
  CHECK(u == prob.initial);
  CHECK(norm_inf(prob.residual(u)) == 0.0);
}

TEST_CASE("fredholm kernel row sums approximate the kernel integral") {
  const std::size_t n = 500;
  auto d = fredholm_discretization(n, 0.5);
  auto fine = fredholm_discretization(10 * (n - 1) + 1, 0.5);
  for (std::size_t i = 0; i < n; i += 7) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += d.k(i, j) * d.w[j];
    double x = d.x[i];
    double refined = 0.0;
    for (std::size_t j = 0; j < fine.n; ++j) refined += std::exp(-std::fabs(x - fine.x[j])) * fine.w[j];
    double exact = 2.0 - std::exp(-x) - std::exp(-(1.0 - x));
    CHECK(rel_err(s, refined) <= 1e-3);
    CHECK(rel_err(s, exact) <= 1e-3);
  }
}

TEST_CASE("fredholm Neumann iteration decreases monotonically") {
  auto prob = fredholm(500, 0.5);
  REQUIRE(prob.exact);
  CHECK(prob.warnings.empty());
  Vec u = prob.initial;
  std::vector<double> err, diff;
  for (int k = 0; k < 20; ++k) {
    Vec g = prob.map(u);
    diff.push_back(norm2(sub(g, u)));
    err.push_back(norm2(sub(u, *prob.exact)));
    u = std::move(g);
  }
  for (std::size_t k = 3; k + 1 < err.size(); ++k) {
    CHECK(err[k + 1] <= err[k]);
    CHECK(diff[k + 1] <= diff[k]);
  }
  CHECK(!fredholm(50, 5.0).warnings.empty());
}

namespace {

SparseGraph graph_from(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

// (I − αP)x = (1−α)v with dangling columns replaced by v, normalized.
Vec dense_pagerank(const SparseGraph& g, double alpha) {
  const std::size_t n = g.n;
  DenseMatrix m = DenseMatrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (g.out[j].empty()) {
      for (std::size_t i = 0; i < n; ++i) m(i, j) -= alpha / n;
    } else {
      for (auto t : g.out[j]) m(t, j) -= alpha / g.out[j].size();
    }
  }
  Vec x = linalg::lu_solve(m, Vec(n, (1.0 - alpha) / n));
  double s = 0;
  for (double v : x) s += v;
  return scaled(x, 1.0 / s);
}

}  // namespace

TEST_CASE("pagerank examples") {
  SparseGraph single;
  single.n = 1;
  single.out.resize(1);
  single.original_ids = {0};
  auto p1 = pagerank(single);
  CHECK(p1.map({1.0})[0] == doctest::Approx(1.0));

  auto cyc = pagerank(graph_from("0 1\n1 0\n"));
  Vec x = cyc.map({0.5, 0.5});
  CHECK(x[0] == doctest::Approx(0.5));
  CHECK(x[1] == doctest::Approx(0.5));

  auto chain = graph_from("0 1\n1 2\n");
  auto prob = pagerank(chain, 0.85);
  Vec oracle = dense_pagerank(chain, 0.85);
  driver::CycleConfig cfg;
  cfg.method = "picard";
  cfg.tol = 1e-14;
  cfg.norm_one = true;
  auto rep = driver::run_cycles(prob, cfg);
  REQUIRE(rep.converged());
  CHECK(norm1(sub(rep.solution, oracle)) < 1e-12);
  CHECK(norm1(sub(prob.map(oracle), oracle)) < 1e-14);

  CHECK_THROWS_AS(pagerank(chain, 1.0), std::invalid_argument);
  SparseGraph bad = chain;
  bad.out[0].push_back(7);
  CHECK_THROWS_AS(pagerank(bad), std::invalid_argument);
}

TEST_CASE("pagerank operator preserves the simplex") {
  Rng rng(21);
  std::vector<SparseGraph> graphs{synthetic_graph(400, 8, 3), graph_from("0 1\n1 2\n2 0\n3 0\n0 4\n")};
  for (const auto& g : graphs) {
    auto prob = pagerank(g);
    for (int t = 0; t < 20; ++t) {
      Vec x = rng.vec(g.n, 0.0, 1.0);
      x = scaled(x, 1.0 / norm1(x));
      Vec y = prob.map(x);
      prob.renormalize(y);
      double s = 0;
      for (double v : y) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::fabs(s - 1.0) <= 1e-12);
      // the unnormalized step already sums to 1
      Vec raw = prob.map(x);
      CHECK(std::fabs(norm1(raw) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("synthetic graph shape and determinism") {
  auto g = synthetic_graph(5000, 8, 42);
  CHECK(g.n == 5000);
  double avg = static_cast<double>(g.edge_count()) / g.n;
  CHECK(avg == doctest::Approx(8.0).epsilon(0.05));
  std::size_t cross = 0;
  for (std::size_t i = 0; i < g.n; ++i)
    for (auto t : g.out[i]) cross += (i < 2500) != (t < 2500);
  CHECK(static_cast<double>(cross) / g.edge_count() == doctest::Approx(0.98).epsilon(0.01));
  auto h = synthetic_graph(5000, 8, 42);
  CHECK(h.out == g.out);
}

TEST_CASE("edge list parsing") {
  auto g = graph_from("0 1\n1 0");
  CHECK(g.n == 2);
  CHECK(g.edge_count() == 2);

  CHECK_THROWS_AS(graph_from("# only a comment\n# another\n"), ParseError);

  auto c = graph_from("# SNAP header\n5\t9\n");
  CHECK(c.n == 2);
  CHECK(c.out[0] == std::vector<std::uint32_t>{1});
  CHECK(c.original_ids == std::vector<long long>{5, 9});
  CHECK(c.out_degree(1) == 0);

  try {
    graph_from("0 1\n1 x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(graph_from("0 1 2\n"), ParseError);
  CHECK_THROWS_AS(graph_from("-1 2\n"), ParseError);

  std::string path = "edge_list_test.txt";
  {
    std::ofstream f(path);
    f << "# t\n1 2\n2 3\n3 1\n";
  }
  auto l = load_edge_list(path);
  CHECK(l.n == 3);
  CHECK(l.edge_count() == 3);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_edge_list("does/not/exist.txt"), ParseError);
}

TEST_CASE("illposed_synthetic") {
  auto clean = illposed_synthetic(20, 0.5, 0.0, 5);
  clean.validate();
  CHECK(illposed::tsvd_optimal_index(clean) == 20);
  CHECK(rel_err(illposed::tsvd_solution(clean, 20), *clean.x_exact) < 1e-8);

  auto m = illposed_synthetic(200, 1.0, 1e-2, 5);
  m.validate();
  CHECK(m.sigma[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(norm2(sub(m.b, *m.b_exact)) / norm2(*m.b_exact) == doctest::Approx(1e-2));
  CHECK(linalg::multiply_transposed(m.v, *m.x_exact)[2] == doctest::Approx(1.0 / 3));
  int kopt = illposed::tsvd_optimal_index(m);
  double best = norm2(sub(illposed::tsvd_solution(m, kopt), *m.x_exact));
  double later = norm2(sub(illposed::tsvd_solution(m, kopt + 10), *m.x_exact));
  CHECK(later > 10.0 * best);

  auto again = illposed_synthetic(200, 1.0, 1e-2, 5);
  CHECK(again.b == m.b);
  CHECK(again.u.data() == m.u.data());
  CHECK_THROWS_AS(illposed_synthetic(10, 0.0, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(illposed_synthetic(10, 1.0, -0.1, 1), std::invalid_argument);
}

TEST_CASE("problem names") {
  auto names = problem_names();
  CHECK(names.size() == 9);
  CHECK(names.front() == "log2");
  CHECK(names.back() == "illposed");
}
