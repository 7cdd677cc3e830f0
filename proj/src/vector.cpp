#include "accel/vector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace accel::vector {

using linalg::DenseMatrix;

namespace {

using VColumn = TableauColumn<Vec>;

void require_terms(const VectorWindow& w, std::size_t count, const char* what) {
  if (w.size() < count) {
    std::ostringstream os;
    os << what << " needs " << count << " terms, window has " << w.size();
    throw InsufficientTermsError(os.str());
  }
}

// Columns Δ^j s_{n+i}, i = 0..count-1.
DenseMatrix difference_matrix(const VectorWindow& w, int j, int first, std::size_t count) {
  std::vector<Vec> cols;
  cols.reserve(count);
  for (std::size_t i = 0; i < count; ++i) cols.push_back(w.difference(j, first + static_cast<int>(i)));
  return DenseMatrix::from_columns(cols);
}

Vec combine(const VectorWindow& w, int first, const Vec& weights) {
  Vec out(w.dim(), 0.0);
  for (std::size_t j = 0; j < weights.size(); ++j) axpy(out, weights[j], w.at(first + static_cast<int>(j)));
  return out;
}

double cos_between(const Vec& a, const Vec& b) {
  double na = norm2(a), nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::fabs(dot(a, b)) / (na * nb);
}

DenseMatrix mmpe_vectors(const VpeMethod& method, std::size_t dim, int k) {
  const auto kk = static_cast<std::size_t>(k);
  if (method.test_vectors) {
    const DenseMatrix& y = *method.test_vectors;
    if (y.rows() != dim) throw DimensionError("mmpe: test vectors have the wrong length");
    if (y.cols() < kk) throw std::invalid_argument("mmpe: fewer test vectors than k");
    DenseMatrix lead = y.leading_cols(kk);
    try {
      linalg::qr_mgs(lead);
    } catch (const linalg::RankDeficientError&) {
      throw std::invalid_argument("mmpe: test vectors are linearly dependent");
    }
    return lead;
  }
  if (kk > dim) throw std::invalid_argument("mmpe: k exceeds the dimension for canonical test vectors");
  DenseMatrix y(dim, kk);
  for (std::size_t i = 0; i < kk; ++i) y(i, i) = 1.0;
  return y;
}

VColumn make_vcolumn(int base, std::size_t size) {
  VColumn c;
  c.base = base;
  c.values.assign(size, Vec{});
  c.broken.assign(size, 0);
  return c;
}

VColumn window_column(const VectorWindow& w) {
  VColumn c = make_vcolumn(w.base_index(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) c.values[i] = w[i];
  return c;
}

void flag(VColumn& c, std::size_t i, const BreakdownPolicy& policy, const char* what, int k) {
  if (policy.action == BreakdownAction::error) {
    std::ostringstream os;
    os << what << ": breakdown at (" << k << ", " << c.base + static_cast<int>(i) << ")";
    throw BreakdownError(os.str());
  }
  c.broken[i] = 1;
}

}  // namespace

Vec generalized_residual(const VectorWindow& window, const Vec& a) {
  const int n = window.base_index();
  require_terms(window, a.size() + 2, "generalized_residual");
  Vec r = window.difference(1, n);
  for (std::size_t i = 0; i < a.size(); ++i) axpy(r, a[i], window.difference(2, n + static_cast<int>(i)));
  return r;
}

VpeResult vpe_extrapolate(const VectorWindow& window, const VpeMethod& method, int k,
                          const BreakdownPolicy& policy) {
  policy.validate();
  if (k < 0) throw std::invalid_argument("vpe: k must be non-negative");
  const int n = window.base_index();
  VpeResult r;
  r.order = k;
  if (k == 0) {
    require_terms(window, 1, "vpe");
    r.value = window.at(n);
    r.gamma = {1.0};
    if (window.size() >= 2) {
      r.residual = window.difference(1, n);
      r.residual_norm = norm2(r.residual);
    }
    return r;
  }
  const auto kk = static_cast<std::size_t>(k);
  require_terms(window, kk + 2, "vpe");
  if (window.dim() < kk && method.kind != VpeKind::mmpe)
    throw std::invalid_argument("vpe: k exceeds the dimension");

  const Vec r0 = window.difference(1, n);
  DenseMatrix d2 = difference_matrix(window, 2, n, kk);

  switch (method.kind) {
    case VpeKind::rre: {
      auto ls = linalg::least_squares(d2, r0, policy);
      const Vec& xi = ls.coeffs;
      r.rank_deficient = ls.rank_deficient;
      r.gamma.assign(kk + 1, 0.0);
      r.gamma[0] = 1.0 + xi[0];
      for (std::size_t j = 1; j < kk; ++j) r.gamma[j] = xi[j] - xi[j - 1];
      r.gamma[kk] = -xi[kk - 1];
      break;
    }
    case VpeKind::mpe: {
      DenseMatrix d1 = difference_matrix(window, 1, n, kk);
      Vec rhs = scaled(window.difference(1, n + k), -1.0);
      auto ls = linalg::least_squares(d1, rhs, policy);
      r.rank_deficient = ls.rank_deficient;
      Vec c = ls.coeffs;
      c.push_back(1.0);
      double sum = 0.0, mag = 0.0;
      for (double v : c) {
        sum += v;
        mag += std::fabs(v);
      }
      if (!breakdown_check(sum, mag, policy)) throw NonexistenceError("mpe: coefficients sum to zero");
      r.gamma = scaled(c, 1.0 / sum);
      break;
    }
    case VpeKind::mmpe: {
      DenseMatrix y = mmpe_vectors(method, window.dim(), k);
      DenseMatrix m = linalg::multiply(y.transpose(), d2);
      Vec rhs = linalg::multiply_transposed(y, r0);
      Vec xi;
      try {
        xi = linalg::lu_solve(m, rhs, policy);
      } catch (const linalg::SingularMatrixError&) {
        throw NonexistenceError("mmpe: projected matrix YᵀΔ²S is singular");
      }
      r.gamma.assign(kk + 1, 0.0);
      r.gamma[0] = 1.0 + xi[0];
      for (std::size_t j = 1; j < kk; ++j) r.gamma[j] = xi[j] - xi[j - 1];
      r.gamma[kk] = -xi[kk - 1];
      break;
    }
  }

  r.value = combine(window, n, r.gamma);
  r.residual.assign(window.dim(), 0.0);
  for (std::size_t j = 0; j <= kk; ++j) axpy(r.residual, r.gamma[j], window.difference(1, n + static_cast<int>(j)));
  r.residual_norm = norm2(r.residual);

  double r0n = norm2(r0);
  if (r0n > 0.0) {
    double rre_res = method.kind == VpeKind::rre && !r.rank_deficient
                         ? r.residual_norm
                         : linalg::least_squares(d2, r0, policy).residual_norm;
    double proj = std::max(0.0, 1.0 - (rre_res / r0n) * (rre_res / r0n));
    r.diagnostics["cos_theta"] = std::sqrt(proj);
    r.diagnostics["cos_angle"] = cos_between(r0, sub(r0, r.residual));
  }
  return r;
}

Vec vpe_oracle(const VectorWindow& window, const VpeMethod& method, int k) {
  if (k < 0 || k > 6) throw std::invalid_argument("vpe_oracle: 0 <= k <= 6");
  const int n = window.base_index();
  require_terms(window, static_cast<std::size_t>(k) + 2, "vpe_oracle");
  if (k == 0) return window.at(n);
  const auto kk = static_cast<std::size_t>(k);
  DenseMatrix y;
  if (method.kind == VpeKind::mmpe) y = mmpe_vectors(method, window.dim(), k);
  // α(i, j): row i = 0..k-1, column j = 0..k
  DenseMatrix alpha(kk, kk + 1);
  for (std::size_t i = 0; i < kk; ++i) {
    Vec left;
    switch (method.kind) {
      case VpeKind::rre: left = window.difference(2, n + static_cast<int>(i)); break;
      case VpeKind::mpe: left = window.difference(1, n + static_cast<int>(i)); break;
      case VpeKind::mmpe: left = y.col(i); break;
    }
    for (std::size_t j = 0; j <= kk; ++j) alpha(i, j) = dot(left, window.difference(1, n + static_cast<int>(j)));
  }
  // Expand both determinants along the first row.
  Vec cof(kk + 1);
  double den = 0.0, scale = 0.0;
  for (std::size_t j = 0; j <= kk; ++j) {
    DenseMatrix minor(kk, kk);
    for (std::size_t i = 0; i < kk; ++i)
      for (std::size_t c = 0, cc = 0; c <= kk; ++c) {
        if (c == j) continue;
        minor(i, cc++) = alpha(i, c);
      }
    cof[j] = (j % 2 ? -1.0 : 1.0) * linalg::determinant(minor);
    den += cof[j];
    scale = std::max(scale, std::fabs(cof[j]));
  }
  if (!breakdown_check(den, scale)) throw NonexistenceError("vpe_oracle: singular denominator");
  return combine(window, n, scaled(cof, 1.0 / den));
}

Estimate<Vec> sbeta(const VectorWindow& window, const std::vector<Vec>& y,
                    const BreakdownPolicy& policy) {
  policy.validate();
  const int k = static_cast<int>(y.size());
  const int n = window.base_index();
  require_terms(window, y.size() + 2, "sbeta");
  for (const auto& v : y)
    if (v.size() != window.dim()) throw DimensionError("sbeta: test vector length");
  // level arrays over shifts 0..len-1
  std::size_t len = static_cast<std::size_t>(k) + 1;
  std::vector<Vec> s(len), beta(len);
  for (std::size_t i = 0; i < len; ++i) {
    s[i] = window[i];
    beta[i] = window.difference(1, n + static_cast<int>(i));
  }
  for (int level = 1; level <= k; ++level) {
    const Vec& yk = y[static_cast<std::size_t>(level - 1)];
    std::size_t nlen = len - 1;
    std::vector<Vec> ns(nlen), nb(nlen);
    for (std::size_t i = 0; i < nlen; ++i) {
      double p0 = dot(yk, beta[i]);
      double p1 = dot(yk, beta[i + 1]);
      if (!breakdown_check(p1, norm2(yk) * norm2(beta[i + 1]), policy))
        throw BreakdownError("sbeta: (y_k, β_{k−1}^{(n+1)}) vanishes at level " + std::to_string(level));
      double a = p0 / p1;
      if (!breakdown_check(1.0 - a, std::max(1.0, std::fabs(a)), policy))
        throw BreakdownError("sbeta: a_k = 1 at level " + std::to_string(level));
      double w = 1.0 / (1.0 - a);
      ns[i] = scaled(sub(s[i], scaled(s[i + 1], a)), w);
      nb[i] = scaled(sub(beta[i], scaled(beta[i + 1], a)), w);
    }
    s = std::move(ns);
    beta = std::move(nb);
    len = nlen;
  }
  Estimate<Vec> e;
  e.value = s[0];
  e.order = k;
  e.pilot_index = n;
  return e;
}

HAlgorithmResult h_algorithm(const VectorWindow& window, const scalar::BasisFamily& basis, int k_max,
                             const BreakdownPolicy& policy) {
  policy.validate();
  if (k_max < 0) throw std::invalid_argument("h_algorithm: k_max must be non-negative");
  require_terms(window, static_cast<std::size_t>(k_max) + 1, "h_algorithm");
  const int base = window.base_index();
  const std::size_t len0 = window.size();
  HAlgorithmResult r{VectorTableau(true, 1)};
  VColumn h = window_column(window);
  r.h.set_column(0, h);

  std::vector<Vec> g(static_cast<std::size_t>(k_max) + 1);  // g[i][j]
  std::vector<std::vector<char>> gbad(g.size());
  for (int i = 1; i <= k_max; ++i) {
    auto& gi = g[static_cast<std::size_t>(i)];
    gi.resize(len0);
    gbad[static_cast<std::size_t>(i)].assign(len0, 0);
    for (std::size_t j = 0; j < len0; ++j) gi[j] = basis(i, base + static_cast<int>(j));
  }
  for (int k = 1; k <= k_max; ++k) {
    const Vec& gk = g[static_cast<std::size_t>(k)];
    const auto& gkb = gbad[static_cast<std::size_t>(k)];
    std::size_t len = h.size() - 1;
    VColumn nh = make_vcolumn(base, len);
    std::vector<Vec> ng(g.size());
    std::vector<std::vector<char>> nbad(g.size());
    for (int i = k + 1; i <= k_max; ++i) {
      ng[static_cast<std::size_t>(i)].assign(len, 0.0);
      nbad[static_cast<std::size_t>(i)].assign(len, 0);
    }
    for (std::size_t j = 0; j < len; ++j) {
      bool bad = h.broken[j] || h.broken[j + 1] || gkb[j] || gkb[j + 1];
      double dg = gk[j + 1] - gk[j];
      if (!bad && !breakdown_check(dg, std::max(std::fabs(gk[j + 1]), std::fabs(gk[j])), policy)) {
        flag(nh, j, policy, "h_algorithm", k);
        bad = true;
      }
      if (bad) {
        nh.broken[j] = 1;
        for (int i = k + 1; i <= k_max; ++i) nbad[static_cast<std::size_t>(i)][j] = 1;
        continue;
      }
      double w = gk[j] / dg;
      nh.values[j] = sub(h.values[j], scaled(sub(h.values[j + 1], h.values[j]), w));
      for (int i = k + 1; i <= k_max; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        if (gbad[ii][j] || gbad[ii][j + 1]) {
          nbad[ii][j] = 1;
          continue;
        }
        ng[ii][j] = g[ii][j] - w * (g[ii][j + 1] - g[ii][j]);
      }
    }
    r.h.set_column(k, nh);
    h = std::move(nh);
    for (int i = k + 1; i <= k_max; ++i) {
      g[static_cast<std::size_t>(i)] = std::move(ng[static_cast<std::size_t>(i)]);
      gbad[static_cast<std::size_t>(i)] = std::move(nbad[static_cast<std::size_t>(i)]);
    }
  }
  return r;
}

VectorTableau vea(const VectorWindow& window, const VeaOptions& options) {
  options.policy.validate();
  require_terms(window, 3, "vea");
  const std::size_t dim = window.dim();
  VectorTableau t(options.full);
  VColumn prev = make_vcolumn(window.base_index(), window.size() + 1);
  for (auto& v : prev.values) v.assign(dim, 0.0);
  VColumn cur = window_column(window);
  t.set_column(-1, prev);
  t.set_column(0, cur);
  for (int k = 0; cur.size() > 1; ++k) {
    std::size_t len = cur.size() - 1;
    VColumn next = make_vcolumn(cur.base, len);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t pi = static_cast<std::size_t>(cur.base + static_cast<int>(i) + 1 - prev.base);
      if (cur.broken[i] || cur.broken[i + 1] || prev.broken[pi]) {
        next.broken[i] = 1;
        continue;
      }
      Vec d = sub(cur.values[i + 1], cur.values[i]);
      double nd = norm2(d);
      double scale = std::max(norm2(cur.values[i + 1]), norm2(cur.values[i]));
      if (!breakdown_check(nd, scale, options.policy)) {
        flag(next, i, options.policy, "vea", k + 1);
        continue;
      }
      // in one dimension use 1/z directly so the scalar algorithm is reproduced bit for bit
      if (dim == 1)
        next.values[i] = Vec{prev.values[pi][0] + 1.0 / d[0]};
      else
        next.values[i] = add(prev.values[pi], scaled(d, 1.0 / (nd * nd)));
    }
    t.set_column(k + 1, next);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return t;
}

TeaResult tea(const VectorWindow& window, const Vec& y, int k, const BreakdownPolicy& policy) {
  policy.validate();
  if (k < 0) throw std::invalid_argument("tea: k must be non-negative");
  if (y.size() != window.dim()) throw DimensionError("tea: y has the wrong length");
  if (norm2(y) == 0.0) throw std::invalid_argument("tea: y must be nonzero");
  const int n = window.base_index();
  const auto kk = static_cast<std::size_t>(k);
  require_terms(window, 2 * kk + 1, "tea");
  TeaResult r;
  r.order = k;
  if (k == 0) {
    r.value = window.at(n);
    r.second = window.at(n);
    r.gamma = {1.0};
    return r;
  }
  // z2[m] = (y, Δ²s_{n+m}), m = 0..2k-2; z1[m] = (y, Δs_{n+m})
  Vec z1(kk), z2(2 * kk - 1);
  for (std::size_t m = 0; m < kk; ++m) z1[m] = dot(y, window.difference(1, n + static_cast<int>(m)));
  for (std::size_t m = 0; m + 1 < 2 * kk; ++m) z2[m] = dot(y, window.difference(2, n + static_cast<int>(m)));
  DenseMatrix t(kk, kk);
  for (std::size_t i = 0; i < kk; ++i)
    for (std::size_t j = 0; j < kk; ++j) t(i, j) = z2[i + j];
  Vec a;
  try {
    a = linalg::lu_solve(t, scaled(z1, -1.0), policy);
  } catch (const linalg::SingularMatrixError&) {
    throw NonexistenceError("tea: T_{k,n} is singular");
  }
  r.coefficients = a;
  r.gamma.assign(kk + 1, 0.0);
  r.gamma[0] = 1.0 - a[0];
  for (std::size_t j = 1; j < kk; ++j) r.gamma[j] = a[j - 1] - a[j];
  r.gamma[kk] = a[kk - 1];
  r.value = combine(window, n, r.gamma);
  r.second = combine(window, n + k, r.gamma);
  return r;
}

VectorTableau topological_epsilon(const VectorWindow& window, const Vec& y, const VeaOptions& options) {
  options.policy.validate();
  require_terms(window, 3, "topological_epsilon");
  if (y.size() != window.dim()) throw DimensionError("topological_epsilon: y has the wrong length");
  const std::size_t dim = window.dim();
  const double ny = norm2(y);
  const auto& policy = options.policy;
  VectorTableau t(options.full);
  VColumn odd_prev = make_vcolumn(window.base_index(), window.size() + 1);  // ε̂_{-1}
  for (auto& v : odd_prev.values) v.assign(dim, 0.0);
  VColumn even = window_column(window);
  t.set_column(-1, odd_prev);
  t.set_column(0, even);
  for (int k = 0; even.size() > 1; ++k) {
    // ε̂_{2k+1}^{(n)} = ε̂_{2k−1}^{(n+1)} + y / (y, Δε̂_{2k}^{(n)})
    std::size_t olen = even.size() - 1;
    VColumn odd = make_vcolumn(even.base, olen);
    for (std::size_t i = 0; i < olen; ++i) {
      if (even.broken[i] || even.broken[i + 1] || odd_prev.broken[i + 1]) {
        odd.broken[i] = 1;
        continue;
      }
      double den = dot(y, sub(even.values[i + 1], even.values[i]));
      double scale = ny * std::max(norm2(even.values[i + 1]), norm2(even.values[i]));
      if (!breakdown_check(den, scale, policy)) {
        flag(odd, i, policy, "topological_epsilon", 2 * k + 1);
        continue;
      }
      odd.values[i] = add(odd_prev.values[i + 1], scaled(y, 1.0 / den));
    }
    t.set_column(2 * k + 1, odd);
    if (olen < 2) break;
    // ε̂_{2k+2}^{(n)} = ε̂_{2k}^{(n+1)} + Δε̂_{2k}^{(n)} / (Δε̂_{2k+1}^{(n)}, Δε̂_{2k}^{(n)})
    std::size_t elen = olen - 1;
    VColumn next = make_vcolumn(even.base, elen);
    for (std::size_t i = 0; i < elen; ++i) {
      if (odd.broken[i] || odd.broken[i + 1] || even.broken[i] || even.broken[i + 1]) {
        next.broken[i] = 1;
        continue;
      }
      Vec de = sub(even.values[i + 1], even.values[i]);
      Vec dod = sub(odd.values[i + 1], odd.values[i]);
      double den = dot(dod, de);
      if (!breakdown_check(den, norm2(dod) * norm2(de), policy)) {
        flag(next, i, policy, "topological_epsilon", 2 * k + 2);
        continue;
      }
      next.values[i] = add(even.values[i + 1], scaled(de, 1.0 / den));
    }
    t.set_column(2 * k + 2, next);
    odd_prev = std::move(odd);
    even = std::move(next);
  }
  return t;
}

Estimate<Vec> stea(const VectorWindow& window, const Vec& y, int k, int variant,
                   const BreakdownPolicy& policy) {
  policy.validate();
  if (variant != 1 && variant != 2) throw std::invalid_argument("stea: variant must be 1 or 2");
  if (k < 0) throw std::invalid_argument("stea: k must be non-negative");
  if (y.size() != window.dim()) throw DimensionError("stea: y has the wrong length");
  const auto kk = static_cast<std::size_t>(k);
  require_terms(window, 2 * kk + 1, "stea");
  const int n0 = window.base_index();
  Estimate<Vec> e;
  e.order = k;
  e.pilot_index = n0;
  if (k == 0) {
    e.value = window.at(n0);
    return e;
  }
  ScalarWindow z({}, n0);
  for (const auto& s : window.terms()) z.push(dot(y, s));
  scalar::TableauOptions full;
  full.full = true;
  full.policy = policy;
  ScalarTableau eps = scalar::epsilon_scalar(z, full);

  auto scalar_at = [&](int col, int n, double& out) {
    if (!eps.exists(col, n) || eps.broken(col, n)) return false;
    out = eps.at(col, n);
    return true;
  };

  std::vector<Vec> cur(window.terms());
  std::vector<char> bad(cur.size(), 0);
  for (int level = 0; level < k; ++level) {
    const int c = 2 * level;
    std::size_t len = cur.size() - 2;
    std::vector<Vec> next(len);
    std::vector<char> nbad(len, 0);
    for (std::size_t i = 0; i < len; ++i) {
      int n = n0 + static_cast<int>(i);
      double top = 0, mid = 0, e1 = 0, e0 = 0;  // ε_{2k+2}^{(n)}, ε_{2k}^{(n+1)}, denominator pair
      std::size_t a = variant == 1 ? i : i + 1;  // ε̂ pair (a, a+1)
      bool ok = scalar_at(c + 2, n, top) && scalar_at(c, n + 1, mid) &&
                scalar_at(c, n + 1 + (variant == 2 ? 1 : 0), e1) &&
                scalar_at(c, n + (variant == 2 ? 1 : 0), e0) && !bad[a] && !bad[a + 1] && !bad[i + 1];
      if (!ok) {
        nbad[i] = 1;
        continue;
      }
      double den = e1 - e0;
      if (!breakdown_check(den, std::max(std::fabs(e1), std::fabs(e0)), policy)) {
        if (policy.action == BreakdownAction::error)
          throw BreakdownError("stea: scalar ε denominator vanishes at level " + std::to_string(level + 1));
        nbad[i] = 1;
        continue;
      }
      double w = (top - mid) / den;
      next[i] = add(cur[i + 1], scaled(sub(cur[a + 1], cur[a]), w));
    }
    cur = std::move(next);
    bad = std::move(nbad);
  }
  if (bad[0]) throw BreakdownError("stea: estimate unavailable after breakdown");
  e.value = cur[0];
  return e;
}

AndersonState AndersonState::start(Vec x0, int depth, double damping) {
  if (depth < 0) throw std::invalid_argument("anderson: depth must be non-negative");
  if (!(damping > 0.0)) throw std::invalid_argument("anderson: damping must be positive");
  AndersonState s;
  s.depth = depth;
  s.damping = damping;
  s.x.push_back(std::move(x0));
  return s;
}

AndersonStep anderson_step(AndersonState state, const Vec& gx, const BreakdownPolicy& policy) {
  policy.validate();
  if (state.x.empty()) throw std::invalid_argument("anderson: state has no iterate");
  if (!(state.damping > 0.0)) throw std::invalid_argument("anderson: damping must be positive");
  const Vec& xk = state.x.back();
  if (gx.size() != xk.size()) throw DimensionError("anderson: G(x) has the wrong length");
  Vec fk = sub(gx, xk);
  state.f.push_back(fk);

  AndersonStep out;
  int mk = std::min(state.depth, state.k);
  mk = std::min<int>(mk, static_cast<int>(state.f.size()) - 1);
  Vec theta;
  int used = mk;
  while (used > 0) {
    std::size_t first = state.f.size() - 1 - static_cast<std::size_t>(used);
    std::vector<Vec> dfc;
    for (std::size_t i = first; i + 1 < state.f.size(); ++i) dfc.push_back(sub(state.f[i + 1], state.f[i]));
    if (dfc.front().size() < dfc.size()) {
      --used;
      ++out.dropped;
      continue;
    }
    auto ls = linalg::least_squares(DenseMatrix::from_columns(dfc), fk, policy);
    if (!ls.rank_deficient) {
      theta = std::move(ls.coeffs);
      break;
    }
    --used;  // drop the oldest difference column and retry
    ++out.dropped;
  }
  out.y = xk;
  out.fbar = fk;
  if (used > 0) {
    std::size_t first = state.f.size() - 1 - static_cast<std::size_t>(used);
    for (std::size_t j = 0; j < theta.size(); ++j) {
      std::size_t i = first + j;
      axpy(out.y, -theta[j], sub(state.x[i + 1], state.x[i]));
      axpy(out.fbar, -theta[j], sub(state.f[i + 1], state.f[i]));
    }
  }
  out.theta = theta;
  out.used_columns = used;
  out.next = add(out.y, scaled(out.fbar, state.damping));

  state.x.push_back(out.next);
  while (static_cast<int>(state.f.size()) > state.depth) {
    state.f.erase(state.f.begin());
    state.x.erase(state.x.begin());
  }
  ++state.k;
  out.state = std::move(state);
  return out;
}

std::vector<std::string> method_names() {
  return {"mpe", "rre", "mmpe", "sbeta", "h", "vea", "tea", "stea1", "stea2", "anderson"};
}

}  // namespace accel::vector
