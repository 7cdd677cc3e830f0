#include "accel/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "accel/scalar.hpp"
#include "accel/vector.hpp"

namespace accel::driver {

Vec FixedPointProblem::residual(const Vec& u) const { return sub(map(u), u); }

void CycleConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (warmup < 0) throw std::invalid_argument("warmup must be non-negative");
  if (method != "picard" && method != "anderson" && width < 1)
    throw std::invalid_argument("width m must be at least 1");
  if (max_cycles < 1) throw std::invalid_argument("max_cycles must be positive");
  if (!(damping > 0.0)) throw std::invalid_argument("damping must be positive");
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  auto names = driver_methods();
  if (std::find(names.begin(), names.end(), method) == names.end())
    throw std::invalid_argument("unknown method: " + method);
  policy.validate();
}

bool convergence_check(double residual, double initial, double tol) {
  if (initial == 0.0) return true;
  return residual / initial <= tol;
}

std::vector<std::string> driver_methods() {
  return {"picard", "anderson", "rre", "mpe", "mmpe", "sbeta", "vea",
          "tea",    "stea1",    "stea2", "epsilon", "aitken"};
}

namespace {

struct EvaluationLimit {};

class Runner {
 public:
  Runner(const FixedPointProblem& p, const CycleConfig& c) : prob_(p), cfg_(c) {
    rep_.method = c.method;
    rep_.n = p.dim;
    rep_.p = c.warmup;
    rep_.m = c.method == "anderson" ? c.depth : c.width;
    rep_.tol = c.tol;
  }

  RunReport run();

 private:
  Vec eval(const Vec& u) {
    if (evals_ >= cfg_.max_evaluations) throw EvaluationLimit{};
    ++evals_;
    Vec g = prob_.map(u);
    if (g.size() != prob_.dim) throw DimensionError("map returned the wrong dimension");
    return g;
  }

  double norm(const Vec& v) const { return cfg_.norm_one ? norm1(v) : norm2(v); }

  // Records the residual of u and returns true when it meets the tolerance.
  bool check(const Vec& u, const Vec& gu) {
    double r = norm(sub(gu, u));
    if (!std::isfinite(r) || r > 1e12 * std::max(r0_, 1e-300))
      throw DivergenceError("residual grew beyond 1e12 times its initial value");
    best_ = u;
    if (cfg_.stop == StopRule::relative_to_initial) {
      last_rel_ = r0_ == 0.0 ? 0.0 : r / r0_;
      return convergence_check(r, r0_, cfg_.tol);
    }
    // relative to ‖u‖; at u = 0 only an exact fixed point counts
    double un = norm(u);
    last_rel_ = un == 0.0 ? r : r / un;
    return un == 0.0 ? r == 0.0 : convergence_check(r, un, cfg_.tol);
  }

  void renorm(Vec& u) const {
    if (prob_.renormalize) prob_.renormalize(u);
  }

  void finish(const std::string& why) {
    rep_.termination = why;
    rep_.final_residual = last_rel_;
    rep_.solution = best_;
  }

  void run_picard(Vec u, Vec gu);
  void run_anderson(Vec u, Vec gu);
  void run_epsilon(Vec u, Vec gu);
  void run_restarted(Vec u, Vec gu);
  Vec extrapolate(const VectorWindow& w, bool& fell_back);

  linalg::DenseMatrix canonical_block(std::size_t n, int k) const {
    linalg::DenseMatrix y(n, static_cast<std::size_t>(k));
    std::size_t first = static_cast<std::size_t>(std::max(cycle_ - 1, 0)) * y.cols();
    for (std::size_t j = 0; j < y.cols(); ++j) y((first + j) % n, j) = 1.0;
    return y;
  }

  const FixedPointProblem& prob_;
  const CycleConfig& cfg_;
  RunReport rep_;
  long evals_ = 0;
  double r0_ = 0.0;
  double last_rel_ = 0.0;
  Vec best_;
  int cycle_ = 0;
};

RunReport Runner::run() {
  auto t0 = std::chrono::steady_clock::now();
  Vec u = prob_.initial;
  if (u.size() != prob_.dim) throw DimensionError("initial guess has the wrong dimension");
  try {
    Vec gu = eval(u);
    r0_ = norm(sub(gu, u));
    if (check(u, gu)) {
      finish("converged");
    } else if (cfg_.method == "picard") {
      run_picard(std::move(u), std::move(gu));
    } else if (cfg_.method == "anderson") {
      run_anderson(std::move(u), std::move(gu));
    } else if (cfg_.method == "epsilon") {
      run_epsilon(std::move(u), std::move(gu));
    } else {
      run_restarted(std::move(u), std::move(gu));
    }
  } catch (const EvaluationLimit&) {
    finish("max_evaluations");
  }
  rep_.iterations = evals_;
  rep_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep_;
}

void Runner::run_picard(Vec u, Vec gu) {
  for (int step = 1; step <= cfg_.max_cycles; ++step) {
    axpy(u, cfg_.damping, sub(gu, u));
    renorm(u);
    gu = eval(u);
    bool done = check(u, gu);
    rep_.cycles = step;
    rep_.residual_history.push_back(last_rel_);
    if (done) return finish("converged");
  }
  finish("max_cycles");
}

void Runner::run_anderson(Vec u, Vec gu) {
  auto state = vector::AndersonState::start(std::move(u), cfg_.depth, cfg_.damping);
  for (int step = 1; step <= cfg_.max_cycles; ++step) {
    auto s = vector::anderson_step(std::move(state), gu, cfg_.policy);
    state = std::move(s.state);
    renorm(state.x.back());
    gu = eval(state.current());
    bool done = check(state.current(), gu);
    rep_.cycles = step;
    rep_.residual_history.push_back(last_rel_);
    if (done) return finish("converged");
  }
  finish("max_cycles");
}

// Componentwise scalar ε on the stream s_0, s_1, ... keeping the last 2m+1
// terms. Stops when successive estimates agree, confirmed by one residual
// evaluation at the estimate.
void Runner::run_epsilon(Vec u, Vec gu) {
  const std::size_t cap = 2 * static_cast<std::size_t>(cfg_.width) + 1;
  std::deque<Vec> terms;
  terms.push_back(std::move(u));
  Vec next = std::move(gu);
  Vec prev_est;
  scalar::TableauOptions opt;
  opt.policy = cfg_.policy;
  for (int step = 1; step <= cfg_.max_cycles; ++step) {
    terms.push_back(next);
    if (terms.size() > cap) terms.pop_front();
    if (terms.size() >= 3) {
      Vec est(prob_.dim);
      for (std::size_t i = 0; i < prob_.dim; ++i) {
        ScalarWindow w;
        for (const auto& t : terms) w.push(t[i]);
        auto tab = scalar::epsilon_scalar(w, opt);
        try {
          est[i] = tab.best_estimate().value;
        } catch (const BreakdownError&) {
          est[i] = terms.back()[i];
        }
      }
      renorm(est);
      rep_.cycles = step;
      if (!prev_est.empty()) {
        double diff = norm(sub(est, prev_est));
        double denom = cfg_.stop == StopRule::relative_to_initial ? r0_ : norm(est);
        if (convergence_check(diff, denom, cfg_.tol)) {
          Vec ge = eval(est);
          bool done = check(est, ge);
          rep_.residual_history.push_back(last_rel_);
          if (done) return finish("converged");
        }
      }
      prev_est = std::move(est);
    }
    next = eval(terms.back());
  }
  finish("max_cycles");
}

Vec Runner::extrapolate(const VectorWindow& w, bool& fell_back) {
  const std::string& m = cfg_.method;
  const int k = cfg_.width;
  fell_back = false;
  try {
    if (m == "rre" || m == "mpe" || m == "mmpe") {
      vector::VpeMethod vm;
      vm.kind = m == "rre" ? vector::VpeKind::rre : m == "mpe" ? vector::VpeKind::mpe : vector::VpeKind::mmpe;
      vm.test_vectors = cfg_.test_vectors ? *cfg_.test_vectors : canonical_block(w.dim(), k);
      return vector::vpe_extrapolate(w, vm, k, cfg_.policy).value;
    }
    if (m == "sbeta") {
      auto ym = cfg_.test_vectors ? *cfg_.test_vectors : canonical_block(w.dim(), k);
      std::vector<Vec> y;
      for (int i = 0; i < k; ++i) y.push_back(ym.col(static_cast<std::size_t>(i)));
      return vector::sbeta(w, y, cfg_.policy).value;
    }
    Vec y = cfg_.tea_y ? *cfg_.tea_y : w.difference(1, 0);
    if (m == "vea") {
      vector::VeaOptions o;
      o.policy = cfg_.policy;
      auto t = vector::vea(w, o);
      if (t.exists(2 * k, 0) && !t.broken(2 * k, 0)) return t.at(2 * k, 0);
      return t.best_estimate().value;
    }
    if (m == "tea") return vector::tea(w, y, k, cfg_.policy).value;
    if (m == "stea1") return vector::stea(w, y, k, 1, cfg_.policy).value;
    if (m == "stea2") return vector::stea(w, y, k, 2, cfg_.policy).value;
    if (m == "aitken") {
      Vec t(w.dim());
      for (std::size_t i = 0; i < w.dim(); ++i) {
        try {
          t[i] = scalar::aitken_step(w[0][i], w[1][i], w[2][i], cfg_.policy).value;
        } catch (const BreakdownError&) {
          t[i] = w[2][i];
        }
      }
      return t;
    }
  } catch (const NonexistenceError&) {
  } catch (const BreakdownError&) {
  } catch (const linalg::SingularMatrixError&) {
  }
  fell_back = true;
  return w.terms().back();
}

void Runner::run_restarted(Vec u, Vec gu) {
  const std::string& m = cfg_.method;
  std::size_t count;
  if (m == "aitken")
    count = 3;
  else if (m == "vea" || m == "tea" || m == "stea1" || m == "stea2")
    count = 2 * static_cast<std::size_t>(cfg_.width) + 1;
  else
    count = static_cast<std::size_t>(cfg_.width) + 2;
  for (int cycle = 1; cycle <= cfg_.max_cycles; ++cycle) {
    cycle_ = cycle;
    for (int j = 0; j < cfg_.warmup; ++j) {
      u = std::move(gu);
      renorm(u);
      gu = eval(u);
      if (check(u, gu)) return finish("warmup");
    }
    VectorWindow w;
    w.push(u);
    w.push(gu);  // s_1 = G(s_0) is already known
    while (w.size() < count) w.push(eval(w.terms().back()));
    bool fell_back = false;
    Vec t = extrapolate(w, fell_back);
    if (fell_back) ++rep_.fallbacks;
    renorm(t);
    u = std::move(t);
    gu = eval(u);
    bool done = check(u, gu);
    rep_.cycles = cycle;
    rep_.residual_history.push_back(last_rel_);
    if (done) return finish("converged");
  }
  finish("max_cycles");
}

}  // namespace

RunReport run_cycles(const FixedPointProblem& problem, const CycleConfig& config) {
  config.validate();
  if (!problem.map) throw std::invalid_argument("problem has no map");
  if (config.tea_y && config.tea_y->size() != problem.dim) throw DimensionError("tea_y has the wrong dimension");
  if (config.test_vectors && (config.test_vectors->rows() != problem.dim ||
                              config.test_vectors->cols() < static_cast<std::size_t>(config.width)))
    throw DimensionError("test_vectors must be N×m");
  Runner r(problem, config);
  return r.run();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() { return "method,N,p,m,tol,cycles,iterations,final_residual,seconds"; }

std::string to_csv_row(const RunReport& r) {
  std::ostringstream os;
  os << r.method << ',' << r.n << ',' << r.p << ',' << r.m << ',' << format_double(r.tol) << ',' << r.cycles << ','
     << r.iterations << ',' << format_double(r.final_residual) << ',' << format_double(r.seconds);
  return os.str();
}

RunReport parse_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  if (f.size() != 9) throw ParseError("expected 9 CSV fields, got " + std::to_string(f.size()), 0);
  RunReport r;
  try {
    r.method = f[0];
    r.n = static_cast<std::size_t>(std::stoull(f[1]));
    r.p = std::stoi(f[2]);
    r.m = std::stoi(f[3]);
    r.tol = std::stod(f[4]);
    r.cycles = std::stoi(f[5]);
    r.iterations = std::stol(f[6]);
    r.final_residual = std::stod(f[7]);
    r.seconds = std::stod(f[8]);
  } catch (const std::logic_error&) {
    throw ParseError("malformed CSV row: " + line, 0);
  }
  return r;
}

}  // namespace accel::driver
