#include "accel/illposed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "accel/driver.hpp"

namespace accel::illposed {

using linalg::DenseMatrix;

namespace {

double col_dot(const DenseMatrix& m, std::size_t j, const Vec& x) {
  const double* c = m.col_data(j);
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += c[i] * x[i];
  return s;
}

// w_j = 1/δ_j² scaled by the largest weight so tiny δ do not overflow.
Vec scaled_weights(const Vec& delta, std::size_t count) {
  double wmax = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    if (delta[j] == 0.0) throw std::invalid_argument("filter_factors: δ_j = 0");
    wmax = std::max(wmax, 1.0 / std::fabs(delta[j]));
  }
  Vec w(count);
  for (std::size_t j = 0; j < count; ++j) {
    double r = 1.0 / (std::fabs(delta[j]) * wmax);
    w[j] = r * r;
  }
  return w;
}

}  // namespace

void SvdModel::validate() const {
  const std::size_t l = ell();
  if (u.cols() != l || v.cols() != l) throw DimensionError("svd model: factor shapes");
  if (b.size() != u.rows()) throw DimensionError("svd model: b has the wrong length");
  for (std::size_t j = 0; j < l; ++j) {
    if (!(sigma[j] > 0.0)) throw std::invalid_argument("svd model: σ must be positive");
    if (j > 0 && sigma[j] > sigma[j - 1]) throw std::invalid_argument("svd model: σ must be descending");
  }
  for (const DenseMatrix* m : {&u, &v}) {
    DenseMatrix g = linalg::multiply(m->transpose(), *m);
    if (linalg::subtract(g, DenseMatrix::identity(l)).max_abs() > 1e-9)
      throw std::invalid_argument("svd model: singular vectors are not orthonormal");
  }
}

SvdModel svd_model(const DenseMatrix& a, const Vec& b) {
  auto f = linalg::jacobi_svd(a);
  std::size_t l = 0;
  double cut = f.sigma.empty() ? 0.0 : 1e-14 * f.sigma[0];
  while (l < f.sigma.size() && f.sigma[l] > cut) ++l;
  SvdModel m;
  m.sigma.assign(f.sigma.begin(), f.sigma.begin() + static_cast<long>(l));
  m.u = f.u.leading_cols(l);
  m.v = f.v.leading_cols(l);
  m.b = b;
  return m;
}

Vec delta_coefficients(const SvdModel& model) {
  Vec d(model.ell());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = col_dot(model.u, j, model.b) / model.sigma[j];
  return d;
}

Vec tsvd_solution(const SvdModel& model, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > model.ell()) throw std::out_of_range("tsvd_solution: k out of range");
  Vec x(model.v.rows(), 0.0);
  for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
    double c = col_dot(model.u, j, model.b) / model.sigma[j];
    const double* vj = model.v.col_data(j);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * vj[i];
  }
  return x;
}

FilterFactors filter_factors(const Vec& delta, int k) {
  if (k < 0 || static_cast<std::size_t>(k) + 1 > delta.size())
    throw std::out_of_range("filter_factors needs δ_1..δ_{k+1}");
  const auto kk = static_cast<std::size_t>(k);
  Vec w = scaled_weights(delta, kk + 1);
  double sum = 0.0;
  for (double x : w) sum += x;
  FilterFactors f;
  f.gamma.resize(kk + 1);
  for (std::size_t j = 0; j <= kk; ++j) f.gamma[j] = w[j] / sum;
  // α_i = tail/(tail + head) rather than 1 − head/sum: no cancellation and
  // never above 1
  f.alpha.assign(kk, 0.0);
  Vec head(kk + 1);
  double h = 0.0;
  for (std::size_t j = 0; j <= kk; ++j) head[j] = h += w[j];
  double tail = 0.0;
  for (std::size_t i = kk; i-- > 0;) {
    tail += w[i + 1];
    f.alpha[i] = tail / (tail + head[i]);
  }
  return f;
}

RreTsvdResult rre_tsvd(const SvdModel& model, int k_max) {
  Vec all = delta_coefficients(model);
  RreTsvdResult r;
  for (std::size_t j = 0; j < all.size(); ++j) {
    if (all[j] == 0.0) {
      r.renumbered = true;
      continue;
    }
    r.retained.push_back(static_cast<int>(j) + 1);
    r.delta.push_back(all[j]);
  }
  if (k_max < 1 || static_cast<std::size_t>(k_max) + 1 > r.delta.size())
    throw std::out_of_range("rre_tsvd: k_max must be at most the number of nonzero δ minus one");
  for (int k = 1; k <= k_max; ++k) {
    RreTsvdStep s;
    s.k = k;
    s.factors = filter_factors(r.delta, k);
    s.t.assign(model.v.rows(), 0.0);
    for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
      double c = s.factors.alpha[j] * r.delta[j];
      const double* vj = model.v.col_data(static_cast<std::size_t>(r.retained[j] - 1));
      for (std::size_t i = 0; i < s.t.size(); ++i) s.t[i] += c * vj[i];
    }
    // 1/√(Σ 1/δ²) with the same scaling as filter_factors
    double wmax = 0.0;
    for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j) wmax = std::max(wmax, 1.0 / std::fabs(r.delta[j]));
    double ssq = 0.0;
    for (double w : scaled_weights(r.delta, static_cast<std::size_t>(k) + 1)) ssq += w;
    s.residual_norm = 1.0 / (wmax * std::sqrt(ssq));
    double dk = r.delta[static_cast<std::size_t>(k) - 1];
    s.residual_norm_alt = std::fabs(dk) * std::sqrt(s.factors.gamma[static_cast<std::size_t>(k) - 1]);
    r.steps.push_back(std::move(s));
  }
  return r;
}

double update_norm(const RreTsvdResult& r, int k) {
  if (k < 1 || static_cast<std::size_t>(k) >= r.steps.size()) throw std::out_of_range("update_norm: k out of range");
  // With w_j = 1/δ_j², H_i = Σ_{j≤i} w_j and S_k = H_k:
  // α_i^{(k+1)} − α_i^{(k)} = w_{k+1} H_i / (S_k S_{k+1}), i = 0..k
  const auto kk = static_cast<std::size_t>(k);
  Vec w = scaled_weights(r.delta, kk + 2);
  Vec head(kk + 2);
  double h = 0.0;
  for (std::size_t j = 0; j < kk + 2; ++j) head[j] = h += w[j];
  double c = w[kk + 1] / (head[kk] * head[kk + 1]);
  double s = 0.0;
  for (std::size_t i = 0; i <= kk; ++i) {
    double d = c * head[i] * r.delta[i];
    s += d * d;
  }
  return std::sqrt(s);
}

int select_truncation_index(const Vec& norms, double slack) {
  if (norms.size() < 3) throw std::invalid_argument("select_truncation_index needs at least 3 values");
  for (std::size_t k = 1; k < norms.size(); ++k)
    if (norms[k] >= (1.0 - slack) * norms[k - 1]) return static_cast<int>(k);
  return static_cast<int>(norms.size());
}

int tsvd_optimal_index(const SvdModel& model) {
  if (!model.x_exact) throw std::invalid_argument("tsvd_optimal_index needs the exact solution");
  Vec x(model.v.rows(), 0.0);
  int best = 1;
  double best_err = INFINITY;
  for (std::size_t j = 0; j < model.ell(); ++j) {
    double c = col_dot(model.u, j, model.b) / model.sigma[j];
    const double* vj = model.v.col_data(j);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * vj[i];
    double e = norm2(sub(x, *model.x_exact));
    if (e < best_err) {
      best_err = e;
      best = static_cast<int>(j) + 1;
    }
  }
  return best;
}

std::string to_csv(const SvdModel& model, const RreTsvdResult& r) {
  std::ostringstream os;
  os << "k,residual,rel_err_tsvd,rel_err_rre\n";
  double xn = model.x_exact ? norm2(*model.x_exact) : 0.0;
  for (const auto& s : r.steps) {
    os << s.k << ',' << driver::format_double(s.residual_norm) << ',';
    if (model.x_exact) {
      Vec xk = tsvd_solution(model, r.retained[static_cast<std::size_t>(s.k) - 1]);
      os << driver::format_double(norm2(sub(xk, *model.x_exact)) / xn) << ','
         << driver::format_double(norm2(sub(s.t, *model.x_exact)) / xn);
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace accel::illposed
