#include "accel/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "accel/linalg.hpp"

namespace accel::scalar {

namespace {

using Column = TableauColumn<double>;

Column make_column(int base, std::size_t size) {
  Column c;
  c.base = base;
  c.values.assign(size, 0.0);
  c.broken.assign(size, 0);
  return c;
}

Column from_window(const ScalarWindow& w) {
  Column c = make_column(w.base_index(), w.size());
  std::copy(w.terms().begin(), w.terms().end(), c.values.begin());
  return c;
}

// Marks entry i broken, or throws when the policy says so.
void flag(Column& c, std::size_t i, const BreakdownPolicy& policy,
          const char* what, int k) {
  if (policy.action == BreakdownAction::error) {
    std::ostringstream os;
    os << what << ": breakdown at (" << k << ", " << c.base + static_cast<int>(i)
       << ")";
    throw BreakdownError(os.str());
  }
  c.broken[i] = 1;
}

// next^{(n)} = prev^{(n+1)} + num(n) / (cur^{(n+1)} − cur^{(n)})
template <class Num>
Column rhombus_step(const Column& prev, const Column& cur, int k_next,
                    const BreakdownPolicy& policy, const char* what, Num num) {
  std::size_t len = cur.size() - 1;
  Column next = make_column(cur.base, len);
  for (std::size_t i = 0; i < len; ++i) {
    int n = cur.base + static_cast<int>(i);
    std::size_t pi = static_cast<std::size_t>(n + 1 - prev.base);
    if (cur.broken[i] || cur.broken[i + 1] || prev.broken[pi]) {
      next.broken[i] = 1;
      continue;
    }
    double d = cur.values[i + 1] - cur.values[i];
    double scale = std::max(std::fabs(cur.values[i + 1]), std::fabs(cur.values[i]));
    if (!breakdown_check(d, scale, policy)) {
      flag(next, i, policy, what, k_next);
      continue;
    }
    next.values[i] = prev.values[pi] + num(n) / d;
  }
  return next;
}

template <class Num>
ScalarTableau rhombus_table(const ScalarWindow& window,
                            const TableauOptions& options, const char* what,
                            Num num) {
  options.policy.validate();
  ScalarTableau t(options.full);
  Column minus1 = make_column(window.base_index(), window.size() + 1);
  Column c0 = from_window(window);
  t.set_column(-1, minus1);
  t.set_column(0, c0);
  Column prev = std::move(minus1), cur = std::move(c0);
  for (int k = 0; cur.size() > 1; ++k) {
    Column next = rhombus_step(prev, cur, k + 1, options.policy, what,
                               [&](int n) { return num(k, n); });
    t.set_column(k + 1, next);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return t;
}

}  // namespace

double KernelModel::term(int n) const {
  double s = limit;
  for (const auto& m : modes) s += m.c * std::pow(m.lambda, n);
  return s;
}

ScalarWindow KernelModel::window(std::size_t count, int base) const {
  ScalarWindow w({}, base);
  for (std::size_t i = 0; i < count; ++i) w.push(term(base + static_cast<int>(i)));
  return w;
}

NodeSequence NodeSequence::standard(std::size_t count) {
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i) x[i] = static_cast<double>(i + 1);
  return NodeSequence(std::move(x));
}

NodeSequence NodeSequence::step_halving(int p, std::size_t count) {
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i)
    x[i] = std::ldexp(1.0, -p * static_cast<int>(i));
  return NodeSequence(std::move(x));
}

void NodeSequence::validate_increasing() const {
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] > 0.0) || !std::isfinite(x_[i]))
      throw std::invalid_argument("nodes must be positive and finite");
    if (i > 0 && !(x_[i] > x_[i - 1]))
      throw std::invalid_argument("nodes must be strictly increasing (x_" +
                                  std::to_string(i) + ")");
  }
}

double RationalFunction::operator()(double z) const {
  auto horner = [z](const Vec& c) {
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * z + c[i];
    return s;
  };
  return horner(p) / horner(q);
}

Estimate<double> aitken_step(double s0, double s1, double s2,
                             const BreakdownPolicy& policy) {
  double d0 = s1 - s0, d1 = s2 - s1;
  double d2 = d1 - d0;
  if (!breakdown_check(d2, std::max(std::fabs(d0), std::fabs(d1)), policy))
    throw BreakdownError("aitken: second difference vanishes");
  Estimate<double> e;
  e.value = s0 - d0 * d0 / d2;
  e.order = 1;
  e.diagnostics["denominator"] = d2;
  return e;
}

Estimate<double> IteratedAitken::estimate() const {
  const auto& lvl = levels[static_cast<std::size_t>(levels_completed)];
  Estimate<double> e;
  e.value = lvl.back();
  e.order = levels_completed;
  e.pilot_index = base + static_cast<int>(lvl.size()) - 1;
  return e;
}

IteratedAitken iterated_aitken(const ScalarWindow& window, int max_k,
                               const BreakdownPolicy& policy) {
  if (max_k < 0) throw std::invalid_argument("max_k must be non-negative");
  if (window.size() < static_cast<std::size_t>(2 * max_k + 1))
    throw InsufficientTermsError("iterated_aitken needs 2*max_k+1 terms");
  IteratedAitken r;
  r.base = window.base_index();
  r.levels.push_back(window.terms());
  for (int k = 1; k <= max_k; ++k) {
    const auto& prev = r.levels.back();
    if (prev.size() < 3) break;
    std::vector<double> next;
    for (std::size_t i = 0; i + 2 < prev.size(); ++i) {
      try {
        next.push_back(aitken_step(prev[i], prev[i + 1], prev[i + 2], policy).value);
      } catch (const BreakdownError&) {
        if (!r.breakdown_level) r.breakdown_level = k;
        break;
      }
    }
    if (next.empty()) break;
    r.levels.push_back(std::move(next));
    r.levels_completed = k;
    if (r.breakdown_level) break;
  }
  return r;
}

ScalarTableau richardson_table(const ScalarWindow& window,
                               const NodeSequence& nodes,
                               const RichardsonOptions& options) {
  options.policy.validate();
  if (nodes.size() < window.size())
    throw InsufficientTermsError("richardson: fewer nodes than terms");
  ScalarTableau t(true, 1);
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    double ratio = nodes[i + 1] / nodes[i];
    if (ratio >= options.ratio_lo && ratio <= options.ratio_hi) {
      std::ostringstream os;
      os << "node ratio x_" << i + 1 << "/x_" << i << " = " << ratio
         << " lies inside [" << options.ratio_lo << ", " << options.ratio_hi
         << "]";
      t.warnings().push_back(os.str());
    }
  }
  Column cur = from_window(window);
  t.set_column(0, cur);
  const int base = window.base_index();
  for (int k = 1; cur.size() > 1; ++k) {
    Column next = make_column(base, cur.size() - 1);
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (cur.broken[i] || cur.broken[i + 1]) {
        next.broken[i] = 1;
        continue;
      }
      double xn = nodes[i], xnk = nodes[i + static_cast<std::size_t>(k)];
      double d = xnk - xn;
      if (!breakdown_check(d, std::max(std::fabs(xn), std::fabs(xnk)), options.policy)) {
        flag(next, i, options.policy, "richardson", k);
        continue;
      }
      next.values[i] = cur.values[i] - xn * (cur.values[i + 1] - cur.values[i]) / d;
    }
    t.set_column(k, next);
    cur = std::move(next);
  }
  return t;
}

Estimate<double> shanks_oracle(const ScalarWindow& window, int k, int n,
                               const BreakdownPolicy& policy) {
  if (k < 0 || k > 8) throw std::invalid_argument("shanks_oracle: 0 <= k <= 8");
  if (n < window.base_index() || n + 2 * k >= window.end_index())
    throw InsufficientTermsError("shanks_oracle needs s_n..s_{n+2k}");
  const auto dim = static_cast<std::size_t>(k) + 1;
  linalg::DenseMatrix num(dim, dim), den(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    num(0, j) = window.at(n + static_cast<int>(j));
    den(0, j) = 1.0;
    for (std::size_t r = 1; r < dim; ++r) {
      double d = window.difference(static_cast<int>(r), n + static_cast<int>(j));
      num(r, j) = d;
      den(r, j) = d;
    }
  }
  // Hadamard bound of the denominator rows as the local scale
  double scale = 1.0;
  for (std::size_t r = 0; r < dim; ++r) {
    double rn = 0.0;
    for (std::size_t j = 0; j < dim; ++j) rn += den(r, j) * den(r, j);
    scale *= std::sqrt(rn);
  }
  double dd = linalg::determinant(den);
  if (!breakdown_check(dd, scale, policy))
    throw BreakdownError("shanks_oracle: denominator determinant vanishes");
  Estimate<double> e;
  e.value = linalg::determinant(num) / dd;
  e.order = k;
  e.pilot_index = n;
  e.diagnostics["denominator"] = dd;
  return e;
}

ScalarTableau epsilon_scalar(const ScalarWindow& window,
                             const TableauOptions& options) {
  if (window.size() < 3) throw InsufficientTermsError("epsilon needs at least 3 terms");
  return rhombus_table(window, options, "epsilon", [](int, int) { return 1.0; });
}

ScalarTableau rho(const ScalarWindow& window,
                  const std::optional<NodeSequence>& nodes,
                  const TableauOptions& options) {
  if (window.size() < 2) throw InsufficientTermsError("rho needs at least 2 terms");
  NodeSequence x = nodes ? *nodes : NodeSequence::standard(window.size());
  x.validate_increasing();
  if (x.size() < window.size()) throw InsufficientTermsError("rho: fewer nodes than terms");
  const int base = window.base_index();
  return rhombus_table(window, options, "rho", [&](int k, int n) {
    auto i = static_cast<std::size_t>(n - base);
    return x[i + static_cast<std::size_t>(k) + 1] - x[i];
  });
}

ScalarTableau theta(const ScalarWindow& window, const TableauOptions& options) {
  options.policy.validate();
  if (window.size() < 2) throw InsufficientTermsError("theta needs at least 2 terms");
  const auto& policy = options.policy;
  ScalarTableau t(options.full);
  Column minus1 = make_column(window.base_index(), window.size() + 1);
  Column even = from_window(window);
  t.set_column(-1, minus1);
  t.set_column(0, even);
  Column odd_prev = std::move(minus1);
  for (int k = 0;; ++k) {
    if (even.size() < 2) break;
    Column odd = rhombus_step(odd_prev, even, 2 * k + 1, policy, "theta",
                              [](int) { return 1.0; });
    t.set_column(2 * k + 1, odd);
    if (odd.size() < 3) break;
    Column next = make_column(even.base, odd.size() - 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (odd.broken[i] || odd.broken[i + 1] || odd.broken[i + 2] ||
          even.broken[i + 1] || even.broken[i + 2]) {
        next.broken[i] = 1;
        continue;
      }
      double d0 = odd.values[i + 1] - odd.values[i];
      double d1 = odd.values[i + 2] - odd.values[i + 1];
      double d2 = d1 - d0;
      if (!breakdown_check(d2, std::max(std::fabs(d0), std::fabs(d1)), policy)) {
        flag(next, i, policy, "theta", 2 * k + 2);
        continue;
      }
      double de = even.values[i + 2] - even.values[i + 1];
      next.values[i] = even.values[i + 1] + de * d1 / d2;
    }
    t.set_column(2 * k + 2, next);
    odd_prev = std::move(odd);
    even = std::move(next);
  }
  return t;
}

EAlgorithmResult e_algorithm(const ScalarWindow& window, const BasisFamily& basis,
                             int k_max, const TableauOptions& options) {
  options.policy.validate();
  if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
  if (window.size() < static_cast<std::size_t>(k_max) + 1)
    throw InsufficientTermsError("e_algorithm needs k_max+1 terms");
  const auto& policy = options.policy;
  const int base = window.base_index();
  const std::size_t len0 = window.size();

  EAlgorithmResult r{ScalarTableau(true, 1), {}};
  Column e = from_window(window);
  r.e.set_column(0, e);
  // g[i] for i = 1..k_max, current level
  std::vector<Column> g(static_cast<std::size_t>(k_max) + 1);
  for (int i = 1; i <= k_max; ++i) {
    Column c = make_column(base, len0);
    for (std::size_t j = 0; j < len0; ++j) {
      c.values[j] = basis(i, base + static_cast<int>(j));
      if (!std::isfinite(c.values[j]))
        throw std::domain_error("basis value is not finite");
    }
    g[static_cast<std::size_t>(i)] = std::move(c);
  }
  for (int k = 1; k <= k_max; ++k) {
    const Column& gk = g[static_cast<std::size_t>(k)];
    r.pivots.push_back(gk.values);
    std::size_t len = e.size() - 1;
    Column ne = make_column(base, len);
    std::vector<Column> ng(g.size());
    for (int i = k + 1; i <= k_max; ++i) ng[static_cast<std::size_t>(i)] = make_column(base, len);
    for (std::size_t j = 0; j < len; ++j) {
      bool bad = e.broken[j] || e.broken[j + 1] || gk.broken[j] || gk.broken[j + 1];
      double dg = gk.values[j + 1] - gk.values[j];
      if (!bad && !breakdown_check(dg, std::max(std::fabs(gk.values[j + 1]),
                                                std::fabs(gk.values[j])),
                                   policy)) {
        flag(ne, j, policy, "e_algorithm", k);
        bad = true;
      }
      if (bad) {
        ne.broken[j] = 1;
        for (int i = k + 1; i <= k_max; ++i) ng[static_cast<std::size_t>(i)].broken[j] = 1;
        continue;
      }
      double w = gk.values[j] / dg;
      ne.values[j] = e.values[j] - w * (e.values[j + 1] - e.values[j]);
      for (int i = k + 1; i <= k_max; ++i) {
        const Column& gi = g[static_cast<std::size_t>(i)];
        Column& out = ng[static_cast<std::size_t>(i)];
        if (gi.broken[j] || gi.broken[j + 1]) {
          out.broken[j] = 1;
          continue;
        }
        out.values[j] = gi.values[j] - w * (gi.values[j + 1] - gi.values[j]);
      }
    }
    r.e.set_column(k, ne);
    e = std::move(ne);
    for (int i = k + 1; i <= k_max; ++i)
      g[static_cast<std::size_t>(i)] = std::move(ng[static_cast<std::size_t>(i)]);
  }
  return r;
}

Estimate<double> e_algorithm_determinant(const ScalarWindow& window,
                                         const BasisFamily& basis, int k, int n,
                                         const BreakdownPolicy& policy) {
  if (k < 0 || k > 8) throw std::invalid_argument("determinant form: 0 <= k <= 8");
  if (n < window.base_index() || n + k >= window.end_index())
    throw InsufficientTermsError("determinant form needs s_n..s_{n+k}");
  const auto dim = static_cast<std::size_t>(k) + 1;
  linalg::DenseMatrix num(dim, dim), den(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    int idx = n + static_cast<int>(j);
    num(0, j) = window.at(idx);
    den(0, j) = 1.0;
    for (std::size_t i = 1; i < dim; ++i) {
      double g = basis(static_cast<int>(i), idx);
      num(i, j) = g;
      den(i, j) = g;
    }
  }
  double scale = 1.0;
  for (std::size_t r = 0; r < dim; ++r) {
    double rn = 0.0;
    for (std::size_t j = 0; j < dim; ++j) rn += den(r, j) * den(r, j);
    scale *= std::sqrt(rn);
  }
  double dd = linalg::determinant(den);
  if (!breakdown_check(dd, scale, policy))
    throw BreakdownError("e_algorithm_determinant: singular denominator");
  Estimate<double> e;
  e.value = linalg::determinant(num) / dd;
  e.order = k;
  e.pilot_index = n;
  return e;
}

RationalFunction pade_approximant(const Vec& coeffs, int m, int n,
                                  const BreakdownPolicy& policy) {
  if (m < 0 || n < 0) throw std::invalid_argument("pade: negative degree");
  if (coeffs.size() < static_cast<std::size_t>(m + n + 1))
    throw InsufficientTermsError("pade needs m+n+1 coefficients");
  auto c = [&](int i) { return i < 0 ? 0.0 : coeffs[static_cast<std::size_t>(i)]; };
  RationalFunction r;
  r.q.assign(static_cast<std::size_t>(n) + 1, 0.0);
  r.q[0] = 1.0;
  if (n > 0) {
    // Σ_{j=1}^{n} Q_j c_{l−j} = −c_l for l = m+1..m+n
    linalg::DenseMatrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    Vec rhs(static_cast<std::size_t>(n));
    for (int row = 0; row < n; ++row) {
      int l = m + 1 + row;
      for (int j = 1; j <= n; ++j)
        a(static_cast<std::size_t>(row), static_cast<std::size_t>(j - 1)) = c(l - j);
      rhs[static_cast<std::size_t>(row)] = -c(l);
    }
    Vec q;
    try {
      q = linalg::lu_solve(a, rhs, policy);
    } catch (const linalg::SingularMatrixError&) {
      throw NonexistenceError("pade: singular order-condition system");
    }
    for (int j = 1; j <= n; ++j) r.q[static_cast<std::size_t>(j)] = q[static_cast<std::size_t>(j - 1)];
  }
  r.p.assign(static_cast<std::size_t>(m) + 1, 0.0);
  for (int i = 0; i <= m; ++i) {
    double s = 0.0;
    for (int j = 0; j <= std::min(i, n); ++j) s += r.q[static_cast<std::size_t>(j)] * c(i - j);
    r.p[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

const std::vector<std::string>& transform_names() {
  static const std::vector<std::string> names{
      "aitken", "aitken-iter", "richardson", "shanks",
      "epsilon", "rho", "theta", "e-algorithm"};
  return names;
}

}  // namespace accel::scalar
