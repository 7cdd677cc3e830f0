#pragma once
// Shared helpers and independent reference implementations for the tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "accel/core.hpp"
#include "accel/linalg.hpp"

namespace testing_support {

using accel::Vec;
using accel::linalg::DenseMatrix;

inline double rel_err(double a, double b) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

inline double rel_err(const Vec& a, const Vec& b) {
  double scale = std::max({accel::norm2(a), accel::norm2(b), 1e-300});
  return accel::norm2(accel::sub(a, b)) / scale;
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(unsigned long long seed) : eng(seed) {}
  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  Vec vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }
  DenseMatrix matrix(std::size_t r, std::size_t c) {
    DenseMatrix m(r, c);
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
};

// Cyclic Jacobi eigenvalue iteration for a small symmetric matrix.
inline Vec symmetric_eigenvalues(DenseMatrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

// Full ε-table in long double, straight from the rhombus rule.
inline std::vector<std::vector<long double>> epsilon_reference(const std::vector<long double>& s) {
  std::vector<std::vector<long double>> cols;
  cols.emplace_back(s.size() + 1, 0.0L);
  cols.push_back(s);
  while (cols.back().size() > 1) {
    const auto& prev = cols[cols.size() - 2];
    const auto& cur = cols.back();
    std::vector<long double> next(cur.size() - 1);
    for (std::size_t n = 0; n + 1 < cur.size(); ++n)
      next[n] = prev[n + 1] + 1.0L / (cur[n + 1] - cur[n]);
    cols.push_back(next);
  }
  cols.erase(cols.begin());  // drop column −1; cols[k] is ε_k
  return cols;
}

// Random orthogonal matrix from QR of a Gaussian matrix (Householder-free:
// Gram–Schmidt twice in long double).
inline DenseMatrix random_orthogonal(std::size_t n, Rng& rng) {
  DenseMatrix q(n, n);
  std::vector<std::vector<long double>> cols;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<long double> v(n);
    for (auto& x : v) x = rng.normal();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) {
        long double r = 0;
        for (std::size_t i = 0; i < n; ++i) r += c[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= r * c[i];
      }
    long double nv = 0;
    for (auto x : v) nv += x * x;
    nv = std::sqrt(nv);
    for (auto& x : v) x /= nv;
    cols.push_back(v);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = static_cast<double>(v[i]);
  }
  return q;
}

// B = Q diag(λ) Qᵀ
inline DenseMatrix symmetric_with_eigenvalues(const Vec& lambda, Rng& rng) {
  const std::size_t n = lambda.size();
  DenseMatrix q = random_orthogonal(n, rng);
  DenseMatrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += q(i, k) * lambda[k] * q(j, k);
      b(i, j) = s;
    }
  return b;
}

// s_{j+1} = B s_j + b
inline accel::VectorWindow linear_window(const DenseMatrix& b_mat, const Vec& b,
                                         const Vec& s0, std::size_t count) {
  accel::VectorWindow w;
  Vec s = s0;
  for (std::size_t i = 0; i < count; ++i) {
    w.push(s);
    s = accel::add(accel::linalg::multiply(b_mat, s), b);
  }
  return w;
}

}  // namespace testing_support
