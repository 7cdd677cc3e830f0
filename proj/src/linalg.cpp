#include "accel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace accel::linalg {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  a_.assign(rows_ * cols_, 0.0);
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    std::size_t j = 0;
    for (double v : r) (*this)(i, j++) = v;
    ++i;
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_columns(const std::vector<Vec>& columns) {
  if (columns.empty()) return {};
  DenseMatrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) m.set_col(j, columns[j]);
  return m;
}

Vec DenseMatrix::col(std::size_t j) const {
  return Vec(col_data(j), col_data(j) + rows_);
}

void DenseMatrix::set_col(std::size_t j, const Vec& v) {
  if (v.size() != rows_) throw DimensionError("set_col: size mismatch");
  std::copy(v.begin(), v.end(), col_data(j));
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::leading_cols(std::size_t count) const {
  DenseMatrix m(rows_, count);
  std::copy(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(rows_ * count),
            m.a_.begin());
  return m;
}

double DenseMatrix::frobenius() const { return norm2(a_); }

double DenseMatrix::max_abs() const { return norm_inf(a_); }

Vec multiply(const DenseMatrix& a, const Vec& x) {
  if (x.size() != a.cols()) throw DimensionError("multiply: size mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double* c = a.col_data(j);
    double xj = x[j];
    if (xj == 0.0) continue;
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += c[i] * xj;
  }
  return y;
}

Vec multiply_transposed(const DenseMatrix& a, const Vec& x) {
  if (x.size() != a.rows()) throw DimensionError("multiply_transposed: size mismatch");
  Vec y(a.cols(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double* c = a.col_data(j);
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += c[i] * x[i];
    y[j] = s;
  }
  return y;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: size mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      double blj = b(l, j);
      if (blj == 0.0) continue;
      const double* al = a.col_data(l);
      double* cj = c.col_data(j);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += al[i] * blj;
    }
  return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("subtract: size mismatch");
  DenseMatrix c(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) = a(i, j) - b(i, j);
  return c;
}

namespace {

double col_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double col_norm(const double* a, std::size_t n) {
  return norm2(Vec(a, a + n));
}

}  // namespace

QrFactors qr_mgs(const DenseMatrix& a, const BreakdownPolicy& policy) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n) throw DimensionError("qr_mgs requires rows >= cols");
  QrFactors f{a, DenseMatrix(n, n)};
  DenseMatrix& q = f.q;
  for (std::size_t j = 0; j < n; ++j) {
    double* v = q.col_data(j);
    double orig = col_norm(v, m);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double* qi = q.col_data(i);
        double r = col_dot(qi, v, m);
        for (std::size_t l = 0; l < m; ++l) v[l] -= r * qi[l];
        f.r(i, j) += r;
      }
    }
    double rjj = col_norm(v, m);
    if (!breakdown_check(rjj, orig, policy))
      throw RankDeficientError("qr_mgs: column " + std::to_string(j) +
                               " is numerically dependent");
    f.r(j, j) = rjj;
    for (std::size_t l = 0; l < m; ++l) v[l] /= rjj;
  }
  return f;
}

LuFactors lu_factor(const DenseMatrix& a, const BreakdownPolicy& policy) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("lu requires a square matrix");
  LuFactors f{a, std::vector<std::size_t>(n), 1.0, 1};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  DenseMatrix& lu = f.lu;
  double amax = a.max_abs();
  double umax = amax;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(lu(i, k)) > best) best = std::fabs(lu(i, k)), p = i;
    double colscale = 0.0;
    for (std::size_t i = 0; i < n; ++i) colscale = std::max(colscale, std::fabs(a(i, k)));
    if (!breakdown_check(best, std::max(colscale, umax), policy))
      throw SingularMatrixError("lu: singular pivot at column " + std::to_string(k));
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    double piv = lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      double l = lu(i, k) / piv;
      lu(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) {
        lu(i, j) -= l * lu(k, j);
        umax = std::max(umax, std::fabs(lu(i, j)));
      }
    }
  }
  f.growth = amax > 0 ? umax / amax : 1.0;
  return f;
}

DenseMatrix lu_solve(const LuFactors& f, const DenseMatrix& b) {
  const std::size_t n = f.lu.rows();
  if (b.rows() != n) throw DimensionError("lu_solve: size mismatch");
  DenseMatrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = b(f.perm[i], c);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) y[i] -= f.lu(i, j) * y[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) y[i] -= f.lu(i, j) * y[j];
      y[i] /= f.lu(i, i);
    }
    x.set_col(c, y);
  }
  return x;
}

DenseMatrix lu_solve(const DenseMatrix& a, const DenseMatrix& b,
                     const BreakdownPolicy& policy) {
  return lu_solve(lu_factor(a, policy), b);
}

Vec lu_solve(const DenseMatrix& a, const Vec& b, const BreakdownPolicy& policy) {
  DenseMatrix bm(b.size(), 1);
  bm.set_col(0, b);
  return lu_solve(lu_factor(a, policy), bm).col(0);
}

double determinant(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("determinant requires a square matrix");
  DenseMatrix m = a;
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
    if (m(p, k) == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      double l = m(i, k) / m(k, k);
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return det;
}

LeastSquaresResult least_squares(const DenseMatrix& a, const Vec& b,
                                 const BreakdownPolicy& policy) {
  if (a.rows() < a.cols()) throw DimensionError("least_squares requires rows >= cols");
  if (b.size() != a.rows()) throw DimensionError("least_squares: size mismatch");
  LeastSquaresResult res;
  const std::size_t n = a.cols();
  try {
    QrFactors f = qr_mgs(a, policy);
    Vec qtb = multiply_transposed(f.q, b);
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
      double s = qtb[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= f.r(i, j) * x[j];
      x[i] = s / f.r(i, i);
    }
    res.coeffs = std::move(x);
    res.rank = n;
  } catch (const RankDeficientError&) {
    SvdFactors s = jacobi_svd(a);
    Vec x(n, 0.0);
    double cut = s.sigma.empty() ? 0.0 : policy.relative_threshold * s.sigma[0];
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(s.sigma[i] > cut) || s.sigma[i] == 0.0) continue;
      ++rank;
      double c = col_dot(s.u.col_data(i), b.data(), a.rows()) / s.sigma[i];
      for (std::size_t j = 0; j < n; ++j) x[j] += c * s.v(j, i);
    }
    res.coeffs = std::move(x);
    res.rank = rank;
    res.rank_deficient = true;
  }
  res.residual_norm = norm2(sub(b, multiply(a, res.coeffs)));
  return res;
}

SvdFactors jacobi_svd(const DenseMatrix& a, double tol, int max_sweeps) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n) throw DimensionError("jacobi_svd requires rows >= cols");
  if (n > 1200) throw DimensionError("jacobi_svd limited to 1200 columns");
  DenseMatrix u = a;
  DenseMatrix v = DenseMatrix::identity(n);
  Vec sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = col_dot(u.col_data(j), u.col_data(j), m);
  int sweep = 0;
  double worst = 0.0;
  for (; sweep < max_sweeps; ++sweep) {
    worst = 0.0;
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = sq[i], beta = sq[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        double* ui = u.col_data(i);
        double* uj = u.col_data(j);
        double gamma = col_dot(ui, uj, m);
        double off = std::fabs(gamma) / std::sqrt(alpha * beta);
        worst = std::max(worst, off);
        if (off <= tol) continue;
        rotated = true;
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = (zeta >= 0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t l = 0; l < m; ++l) {
          double x = ui[l], y = uj[l];
          ui[l] = c * x - s * y;
          uj[l] = s * x + c * y;
        }
        double* vi = v.col_data(i);
        double* vj = v.col_data(j);
        for (std::size_t l = 0; l < n; ++l) {
          double x = vi[l], y = vj[l];
          vi[l] = c * x - s * y;
          vj[l] = s * x + c * y;
        }
        sq[i] = col_dot(ui, ui, m);
        sq[j] = col_dot(uj, uj, m);
      }
    }
    if (!rotated) break;
  }
  if (sweep == max_sweeps)
    throw ConvergenceError("jacobi_svd: no convergence after " +
                               std::to_string(max_sweeps) + " sweeps",
                           worst);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Vec sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = col_norm(u.col_data(j), m);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdFactors f{DenseMatrix(m, n), Vec(n), DenseMatrix(n, n), sweep + 1};
  double smax = n ? sigma[order[0]] : 0.0;
  std::vector<std::size_t> missing;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = order[k];
    f.sigma[k] = sigma[j];
    f.v.set_col(k, v.col(j));
    if (sigma[j] > 0.0 && sigma[j] > 1e-300 * smax) {
      Vec c = u.col(j);
      for (double& x : c) x /= sigma[j];
      f.u.set_col(k, c);
    } else {
      missing.push_back(k);
    }
  }
  // complete U with unit vectors orthogonalized against the columns already set
  std::vector<char> done(n, 1);
  for (std::size_t k : missing) done[k] = 0;
  std::size_t e = 0;
  for (std::size_t k : missing) {
    for (; e < m; ++e) {
      Vec c(m, 0.0);
      c[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < n; ++i) {
          if (!done[i]) continue;
          double r = col_dot(f.u.col_data(i), c.data(), m);
          for (std::size_t l = 0; l < m; ++l) c[l] -= r * f.u(l, i);
        }
      double nc = norm2(c);
      if (nc > 1e-8) {
        for (double& x : c) x /= nc;
        f.u.set_col(k, c);
        done[k] = 1;
        ++e;
        break;
      }
    }
  }
  return f;
}

GmresResult gmres_oracle(const Applicator& a, const Vec& b, int k) {
  GmresResult res;
  const std::size_t n = b.size();
  if (k < 0 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("gmres_oracle: k must lie in [0, dimension]");
  double beta = norm2(b);
  res.residual_norms.push_back(beta);
  if (beta == 0.0) {
    res.exact = true;
    return res;
  }
  std::vector<Vec> basis{scaled(b, 1.0 / beta)};
  std::vector<Vec> h;  // columns of the Hessenberg matrix after rotations
  Vec cs, sn, g{beta};
  for (int j = 0; j < k; ++j) {
    Vec w = a(basis[static_cast<std::size_t>(j)]);
    double wnorm = norm2(w);
    Vec hj(static_cast<std::size_t>(j) + 2, 0.0);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) {
        double r = dot(basis[static_cast<std::size_t>(i)], w);
        axpy(w, -r, basis[static_cast<std::size_t>(i)]);
        hj[static_cast<std::size_t>(i)] += r;
      }
    double hnext = norm2(w);
    hj[static_cast<std::size_t>(j) + 1] = hnext;
    for (int i = 0; i < j; ++i) {
      auto ii = static_cast<std::size_t>(i);
      double x = hj[ii], y = hj[ii + 1];
      hj[ii] = cs[ii] * x + sn[ii] * y;
      hj[ii + 1] = -sn[ii] * x + cs[ii] * y;
    }
    auto jj = static_cast<std::size_t>(j);
    double x = hj[jj], y = hj[jj + 1];
    double r = std::hypot(x, y);
    double c = r == 0.0 ? 1.0 : x / r, s = r == 0.0 ? 0.0 : y / r;
    cs.push_back(c);
    sn.push_back(s);
    g.push_back(-s * g[jj]);
    g[jj] = c * g[jj];
    h.push_back(hj);
    bool happy = hnext <= 1e-14 * std::max(wnorm, 1e-300);
    if (happy) {
      res.residual_norms.push_back(0.0);
      res.exact = true;
      return res;
    }
    res.residual_norms.push_back(std::fabs(g[jj + 1]));
    basis.push_back(scaled(w, 1.0 / hnext));
  }
  return res;
}

}  // namespace accel::linalg
