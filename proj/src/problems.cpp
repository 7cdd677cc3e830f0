#include "accel/problems.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace accel::problems {

using linalg::DenseMatrix;

ScalarWindow series_generator(const std::string& name, std::size_t count, const SeriesParams& params) {
  if (count < 1) throw std::invalid_argument("series_generator: count must be at least 1");
  ScalarWindow w;
  if (name == "log2") {
    double s = 0.0;
    for (std::size_t n = 1; n <= count; ++n) {
      s += (n % 2 ? 1.0 : -1.0) / static_cast<double>(n);
      w.push(s);
    }
  } else if (name == "leibniz" || name == "leibniz_pi") {
    double s = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
      s += 4.0 * (n % 2 ? -1.0 : 1.0) / static_cast<double>(2 * n + 1);
      w.push(s);
    }
  } else if (name == "logseq" || name == "logarithmic") {
    for (std::size_t n = 0; n < count; ++n) w.push(params.limit + 1.0 / static_cast<double>(n + 1));
  } else if (name == "geom" || name == "geometric_mixture") {
    w = params.mixture.window(count);
  } else {
    throw std::invalid_argument("unknown series: " + name);
  }
  return w;
}

double series_limit(const std::string& name, const SeriesParams& params) {
  if (name == "log2") return std::numbers::ln2;
  if (name == "leibniz" || name == "leibniz_pi") return std::numbers::pi;
  if (name == "logseq" || name == "logarithmic") return params.limit;
  if (name == "geom" || name == "geometric_mixture") return params.mixture.limit;
  throw std::invalid_argument("unknown series: " + name);
}

Vec LinearIteration::apply(const Vec& s) const { return add(linalg::multiply(b_mat, s), b); }

VectorWindow LinearIteration::iterate(const Vec& s0, std::size_t count) const {
  VectorWindow w;
  Vec s = s0;
  for (std::size_t i = 0; i < count; ++i) {
    w.push(s);
    if (i + 1 < count) s = apply(s);
  }
  return w;
}

driver::FixedPointProblem LinearIteration::as_problem(const Vec& initial) const {
  driver::FixedPointProblem p;
  p.name = "linear";
  p.dim = b.size();
  auto self = *this;
  p.map = [self](const Vec& u) { return self.apply(u); };
  p.initial = initial;
  p.exact = xstar;
  return p;
}

LinearIteration linear_iteration_generator(std::size_t n, double rho, std::uint64_t seed) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("spectral radius must lie in (0, 1)");
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
  LinearIteration li;
  li.b_mat = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) li.b_mat(i, j) = unit(eng);
  Vec x(n, 1.0);
  double est = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vec y = linalg::multiply(li.b_mat, x);
    est = norm2(y) / norm2(x);
    x = scaled(y, 1.0 / norm2(y));
  }
  double s = rho / est;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) li.b_mat(i, j) *= s;
  li.spectral_radius = rho;
  li.xstar.resize(n);
  for (double& v : li.xstar) v = sym(eng);
  li.b = sub(li.xstar, linalg::multiply(li.b_mat, li.xstar));
  return li;
}

DenseMatrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = g(eng);
  return linalg::qr_mgs(a).q;
}

LinearIteration linear_iteration_with_spectrum(const Vec& eigenvalues, std::uint64_t seed) {
  const std::size_t n = eigenvalues.size();
  DenseMatrix q = random_orthogonal(n, seed);
  LinearIteration li;
  li.b_mat = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double* qk = q.col_data(k);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) li.b_mat(i, j) += eigenvalues[k] * qk[i] * qk[j];
  }
  double r = 0.0;
  for (double l : eigenvalues) r = std::max(r, std::fabs(l));
  li.spectral_radius = r;
  std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  li.xstar.resize(n);
  for (double& v : li.xstar) v = sym(eng);
  li.b = sub(li.xstar, linalg::multiply(li.b_mat, li.xstar));
  return li;
}

Vec apply_laplacian(std::size_t p, const Vec& u) {
  if (u.size() != p * p) throw DimensionError("apply_laplacian: size must be p²");
  const double h = 1.0 / static_cast<double>(p + 1);
  const double ih2 = 1.0 / (h * h);
  Vec out(u.size());
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i) {
      std::size_t c = i + p * j;
      double s = 4.0 * u[c];
      if (i > 0) s -= u[c - 1];
      if (i + 1 < p) s -= u[c + 1];
      if (j > 0) s -= u[c - p];
      if (j + 1 < p) s -= u[c + p];
      out[c] = s * ih2;
    }
  return out;
}

driver::FixedPointProblem reaction_diffusion(std::size_t p) {
  if (p < 3) throw std::invalid_argument("reaction_diffusion: grid must be at least 3");
  const double h = 1.0 / static_cast<double>(p + 1);
  const double omega = h * h / 5.0;
  Vec ustar(p * p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      ustar[i + p * j] = std::sin(std::numbers::pi * static_cast<double>(i + 1) * h) *
                         std::sin(std::numbers::pi * static_cast<double>(j + 1) * h);
  Vec b = apply_laplacian(p, ustar);
  for (std::size_t c = 0; c < b.size(); ++c) b[c] += ustar[c] * ustar[c] * ustar[c];

  driver::FixedPointProblem prob;
  prob.name = "pde";
  prob.dim = p * p;
  prob.map = [p, omega, b](const Vec& u) {
    Vec au = apply_laplacian(p, u);
    Vec g = u;
    for (std::size_t c = 0; c < u.size(); ++c) g[c] += omega * (b[c] - au[c] - u[c] * u[c] * u[c]);
    return g;
  };
  prob.initial.assign(p * p, 0.0);
  prob.exact = ustar;
  return prob;
}

FredholmDiscretization fredholm_discretization(std::size_t n, double lambda) {
  if (n < 2) throw std::invalid_argument("fredholm: need at least 2 nodes");
  FredholmDiscretization d;
  d.n = n;
  d.lambda = lambda;
  const double h = 1.0 / static_cast<double>(n - 1);
  d.x.resize(n);
  d.w.assign(n, h);
  d.w.front() = d.w.back() = h / 2.0;
  d.f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.x[i] = static_cast<double>(i) * h;
    d.f[i] = std::sin(std::numbers::pi * d.x[i]);
  }
  d.k = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) d.k(i, j) = std::exp(-std::fabs(d.x[i] - d.x[j]));
  return d;
}

driver::FixedPointProblem fredholm(std::size_t n, double lambda) {
  auto d = fredholm_discretization(n, lambda);
  DenseMatrix kw(n, n);  // λ K diag(w)
  double row_max = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) kw(i, j) = lambda * d.k(i, j) * d.w[j];
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::fabs(kw(i, j));
    row_max = std::max(row_max, s);
  }
  driver::FixedPointProblem prob;
  prob.name = "fredholm";
  prob.dim = n;
  if (row_max >= 1.0)
    prob.warnings.push_back("fredholm: |λ|·‖K_h‖∞ = " + std::to_string(row_max) + " >= 1, contraction not guaranteed");
  Vec f = d.f;
  prob.map = [kw, f](const Vec& u) { return add(f, linalg::multiply(kw, u)); };
  prob.initial = f;
  try {
    prob.exact = linalg::lu_solve(linalg::subtract(DenseMatrix::identity(n), kw), f);
  } catch (const linalg::SingularMatrixError&) {
  }
  return prob;
}

std::size_t SparseGraph::edge_count() const {
  std::size_t e = 0;
  for (const auto& o : out) e += o.size();
  return e;
}

SparseGraph parse_edge_list(std::istream& in) {
  SparseGraph g;
  std::unordered_map<long long, std::uint32_t> ids;
  auto id_of = [&](long long raw) {
    auto it = ids.find(raw);
    if (it != ids.end()) return it->second;
    auto c = static_cast<std::uint32_t>(g.original_ids.size());
    ids.emplace(raw, c);
    g.original_ids.push_back(raw);
    g.out.emplace_back();
    return c;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long a, b;
    if (!(ls >> a)) {
      std::string rest;
      ls.clear();
      if (ls >> rest) throw ParseError("edge list: expected integer node id", lineno);
      continue;  // blank or comment
    }
    std::string extra;
    if (!(ls >> b) || (ls >> extra)) throw ParseError("edge list: expected 'src dst'", lineno);
    if (a < 0 || b < 0) throw ParseError("edge list: negative node id", lineno);
    auto s = id_of(a);
    auto t = id_of(b);
    g.out[s].push_back(t);
  }
  g.n = g.original_ids.size();
  if (g.edge_count() == 0) throw ParseError("edge list contains no edges", lineno);
  return g;
}

SparseGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return parse_edge_list(in);
}

SparseGraph synthetic_graph(std::size_t n, double avg_out_degree, std::uint64_t seed, double intra) {
  if (n < 2) throw std::invalid_argument("synthetic_graph: need at least 2 nodes");
  std::mt19937_64 eng(seed);
  const std::size_t half = n / 2;
  auto max_deg = static_cast<int>(std::lround(2 * avg_out_degree - 1));
  std::uniform_int_distribution<int> deg(1, std::max(1, max_deg));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> lo(0, half - 1), hi(half, n - 1);
  SparseGraph g;
  g.n = n;
  g.out.resize(n);
  g.original_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.original_ids[i] = static_cast<long long>(i);
    bool low = i < half;
    int d = deg(eng);
    for (int e = 0; e < d; ++e) {
      bool same = coin(eng) < intra;
      bool to_low = same ? low : !low;
      g.out[i].push_back(static_cast<std::uint32_t>(to_low ? lo(eng) : hi(eng)));
    }
  }
  return g;
}

driver::FixedPointProblem pagerank(const SparseGraph& g, double alpha) {
  if (g.n < 1) throw std::invalid_argument("pagerank: empty graph");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("pagerank: α must lie in (0, 1)");
  if (g.out.size() != g.n) throw std::invalid_argument("pagerank: malformed graph");
  for (const auto& o : g.out)
    for (auto t : o)
      if (t >= g.n) throw std::invalid_argument("pagerank: edge target out of range");
  const double v = 1.0 / static_cast<double>(g.n);
  driver::FixedPointProblem prob;
  prob.name = "pagerank";
  prob.dim = g.n;
  prob.map = [g, alpha, v](const Vec& x) {
    Vec y(g.n, (1.0 - alpha) * v);
    double dangling = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
      const auto& o = g.out[j];
      if (o.empty()) {
        dangling += alpha * x[j];
        continue;
      }
      double share = alpha * x[j] / static_cast<double>(o.size());
      for (auto t : o) y[t] += share;
    }
    if (dangling != 0.0)
      for (double& yi : y) yi += dangling * v;
    return y;
  };
  prob.renormalize = [](Vec& x) {
    double s = 0.0;
    for (double xi : x) s += xi;
    if (s != 0.0)
      for (double& xi : x) xi /= s;
  };
  prob.initial.assign(g.n, v);
  return prob;
}

illposed::SvdModel illposed_synthetic(std::size_t n, double a, double nu, std::uint64_t seed) {
  if (!(a > 0.0)) throw std::invalid_argument("illposed_synthetic: decay rate must be positive");
  if (nu < 0.0) throw std::invalid_argument("illposed_synthetic: noise level must be non-negative");
  illposed::SvdModel m;
  m.u = random_orthogonal(n, seed);
  m.v = random_orthogonal(n, seed + 1);
  m.sigma.resize(n);
  Vec xh(n, 0.0), bh(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    m.sigma[j] = std::exp(-a * static_cast<double>(j + 1));
    double c = 1.0 / static_cast<double>(j + 1);
    axpy(xh, c, m.v.col(j));
    axpy(bh, m.sigma[j] * c, m.u.col(j));
  }
  std::mt19937_64 eng(seed + 2);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec e(n);
  for (double& x : e) x = g(eng);
  e = scaled(e, nu * norm2(bh) / norm2(e));
  m.b = add(bh, e);
  m.b_exact = bh;
  m.x_exact = xh;
  m.noise_level = nu;
  return m;
}

std::vector<std::string> problem_names() {
  return {"log2", "leibniz", "logseq", "geom", "linear", "pde", "fredholm", "pagerank", "illposed"};
}

}  // namespace accel::problems
