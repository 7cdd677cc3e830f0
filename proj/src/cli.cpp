#include "accel/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "accel/illposed.hpp"
#include "accel/problems.hpp"
#include "accel/scalar.hpp"

namespace accel::cli {

using driver::CycleConfig;
using driver::RunReport;

driver::FixedPointProblem build_problem(const ProblemSpec& spec, CycleConfig& config) {
  const std::string& p = spec.name;
  if (p == "linear") {
    auto li = problems::linear_iteration_generator(spec.n, spec.rho, spec.seed);
    config.stop = driver::StopRule::relative_to_initial;
    return li.as_problem(Vec(spec.n, 0.0));
  }
  if (p == "pde") {
    config.stop = driver::StopRule::relative_to_initial;
    return problems::reaction_diffusion(spec.grid);
  }
  if (p == "fredholm") {
    config.stop = driver::StopRule::relative_to_iterate;
    return problems::fredholm(spec.n, spec.lambda);
  }
  if (p == "pagerank") {
    config.stop = driver::StopRule::relative_to_iterate;
    config.norm_one = true;
    auto g = spec.graph.empty() ? problems::synthetic_graph(spec.n, spec.degree, spec.seed)
                                : problems::load_edge_list(spec.graph);
    return problems::pagerank(g, spec.alpha);
  }
  throw std::invalid_argument("unknown problem: " + p + " (linear, pde, fredholm, pagerank)");
}

int thread_cap() {
  if (const char* env = std::getenv("ACCELERANT_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<RunReport> run_bench(const BenchSpec& spec, int threads) {
  if (spec.methods.empty()) throw std::invalid_argument("bench needs at least one method");
  CycleConfig base = spec.config;
  const auto prob = build_problem(spec.problem, base);
  std::vector<RunReport> rows(spec.methods.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      CycleConfig c = base;
      c.method = spec.methods[i];
      try {
        rows[i] = driver::run_cycles(prob, c);
      } catch (const std::exception& e) {
        RunReport r;
        r.method = c.method;
        r.n = prob.dim;
        r.p = c.warmup;
        r.m = c.method == "anderson" ? c.depth : c.width;
        r.tol = c.tol;
        r.termination = "error";
        r.error = e.what();
        rows[i] = r;
      }
    }
  };
  const int nthreads = std::clamp(threads, 1, static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

namespace {

std::string status_of(const RunReport& r) {
  if (!r.error.empty()) {
    std::string e = r.error;
    std::replace(e.begin(), e.end(), ',', ';');
    std::replace(e.begin(), e.end(), '|', '/');
    return "error: " + e;
  }
  return r.termination;
}

}  // namespace

std::string format_reports(const std::vector<RunReport>& rows, Format format) {
  std::ostringstream os;
  if (format == Format::csv) {
    os << driver::csv_header() << ",status\n";
    for (const auto& r : rows) os << driver::to_csv_row(r) << ',' << status_of(r) << '\n';
    return os.str();
  }
  os << "| method | N | p | m | tol | cycles | iterations | final_residual | seconds | status |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    char res[32], sec[32], tol[32];
    std::snprintf(res, sizeof res, "%.3e", r.final_residual);
    std::snprintf(sec, sizeof sec, "%.3f", r.seconds);
    std::snprintf(tol, sizeof tol, "%g", r.tol);
    os << "| " << r.method << " | " << r.n << " | " << r.p << " | " << r.m << " | " << tol << " | " << r.cycles
       << " | " << r.iterations << " | " << res << " | " << sec << " | " << status_of(r) << " |\n";
  }
  return os.str();
}

namespace {

struct Common {
  double tol = 1e-6;
  int max_cycles = 100000;
  std::uint64_t seed = 42;
  std::string format = "md";
  std::string output;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--tol", c.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-cycles", c.max_cycles, "cycle limit")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "seed for every random choice");
  app->add_option("--format", c.format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  app->add_option("--output", c.output, "write the result here instead of stdout");
}

void add_problem(CLI::App* app, ProblemSpec& p) {
  app->add_option("--problem", p.name, "linear | pde | fredholm | pagerank")
      ->check(CLI::IsMember({"linear", "pde", "fredholm", "pagerank"}));
  app->add_option("--n", p.n, "size (linear, fredholm, synthetic pagerank)")->check(CLI::PositiveNumber);
  app->add_option("--grid", p.grid, "pde interior grid side")->check(CLI::Range(3, 2000));
  app->add_option("--rho", p.rho, "linear spectral radius")->check(CLI::Range(0.0, 1.0));
  app->add_option("--lambda", p.lambda, "fredholm λ");
  app->add_option("--alpha", p.alpha, "pagerank damping")->check(CLI::Range(0.0, 1.0));
  app->add_option("--degree", p.degree, "synthetic pagerank average out-degree")->check(CLI::PositiveNumber);
  app->add_option("--graph", p.graph, "pagerank edge-list file")->check(CLI::ExistingFile);
}

void add_cycle(CLI::App* app, CycleConfig& c) {
  app->add_option("--m", c.width, "extrapolation width")->check(CLI::PositiveNumber);
  app->add_option("--p", c.warmup, "warmup iterations per cycle")->check(CLI::NonNegativeNumber);
  app->add_option("--depth", c.depth, "anderson depth")->check(CLI::NonNegativeNumber);
  app->add_option("--damping", c.damping, "picard / anderson damping")->check(CLI::PositiveNumber);
}

// Emits to --output when given, else to out.
void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw ParseError("cannot write " + c.output, 0);
  f << text;
}

struct ScalarArgs {
  std::string series;
  std::string input;
  std::string method = "epsilon";
  int terms = 0;  // 0: 15 for builtin series, the whole file otherwise
  int k = -1;
  std::string nodes = "harmonic";
};

ScalarWindow scalar_window(const ScalarArgs& a, int terms, double& limit, bool& known) {
  known = false;
  if (!a.input.empty()) {
    auto w = to_scalar(load_sequence(a.input));
    if (terms > 0 && terms < static_cast<int>(w.size())) w = w.slice(w.base_index(), static_cast<std::size_t>(terms));
    return w;
  }
  known = true;
  limit = problems::series_limit(a.series);
  return problems::series_generator(a.series, static_cast<std::size_t>(terms > 0 ? terms : 15));
}

scalar::NodeSequence nodes_for(const std::string& kind, std::size_t count) {
  if (kind == "halving") return scalar::NodeSequence::step_halving(1, count);
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i) x[i] = 1.0 / static_cast<double>(i + 1);
  return scalar::NodeSequence(x);
}

struct ScalarOutcome {
  Estimate<double> est;
  std::string column_text;
  std::size_t breakdowns = 0;
  std::vector<std::string> warnings;
};

void describe_column(const ScalarTableau& t, int k, Format f, ScalarOutcome& o) {
  std::ostringstream os;
  const auto& col = t.column(k);
  if (f == Format::md) os << "| n | column " << k << " |\n|---|---|\n";
  else os << "n,value\n";
  for (std::size_t i = 0; i < col.size(); ++i) {
    int n = col.base + static_cast<int>(i);
    std::string v = col.broken[i] ? "breakdown" : driver::format_double(col.values[i]);
    if (f == Format::md) os << "| " << n << " | " << v << " |\n";
    else os << n << ',' << v << '\n';
  }
  o.column_text = os.str();
}

ScalarOutcome apply_scalar(const ScalarWindow& w, const ScalarArgs& a, Format f) {
  ScalarOutcome o;
  const int len = static_cast<int>(w.size());
  const std::string& m = a.method;
  auto from_tableau = [&](const ScalarTableau& t) {
    o.breakdowns = t.breakdown_count();
    o.warnings = t.warnings();
    o.est = t.best_estimate();
    describe_column(t, o.est.order, f, o);
  };
  if (m == "aitken" || m == "aitken-iter") {
    int kmax = m == "aitken" ? 1 : (len - 1) / 2;
    if (a.k > 0) kmax = std::min(kmax, a.k);
    auto it = scalar::iterated_aitken(w, kmax);
    o.est = it.estimate();
    if (it.breakdown_level) o.breakdowns = 1;
    std::ostringstream os;
    const auto& lv = it.levels[static_cast<std::size_t>(o.est.order)];
    os << (f == Format::md ? "| n | level " + std::to_string(o.est.order) + " |\n|---|---|\n" : "n,value\n");
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (f == Format::md) os << "| " << it.base + static_cast<int>(i) << " | " << driver::format_double(lv[i]) << " |\n";
      else os << it.base + static_cast<int>(i) << ',' << driver::format_double(lv[i]) << '\n';
    }
    o.column_text = os.str();
  } else if (m == "richardson") {
    from_tableau(scalar::richardson_table(w, nodes_for(a.nodes, w.size())));
  } else if (m == "e-algorithm") {
    auto x = nodes_for(a.nodes, w.size());
    int kmax = a.k > 0 ? std::min(a.k, len - 1) : len - 1;
    auto r = scalar::e_algorithm(w, [x](int i, int n) { return std::pow(x[static_cast<std::size_t>(n)], i); }, kmax);
    from_tableau(r.e);
  } else if (m == "epsilon") {
    from_tableau(scalar::epsilon_scalar(w));
  } else if (m == "rho") {
    from_tableau(scalar::rho(w));
  } else if (m == "theta") {
    from_tableau(scalar::theta(w));
  } else if (m == "shanks") {
    int k = std::min(8, (len - 1) / 2);
    if (a.k > 0) k = std::min(k, a.k);
    if (k < 1) throw InsufficientTermsError("shanks needs at least 3 terms");
    int n = w.end_index() - 1 - 2 * k;
    o.est = scalar::shanks_oracle(w, k, n);
    std::ostringstream os;
    os << (f == Format::md ? "| n | e_" + std::to_string(k) + " |\n|---|---|\n" : "n,value\n");
    if (f == Format::md) os << "| " << n << " | " << driver::format_double(o.est.value) << " |\n";
    else os << n << ',' << driver::format_double(o.est.value) << '\n';
    o.column_text = os.str();
  } else {
    throw std::invalid_argument("unknown method: " + m);
  }
  return o;
}

int cmd_scalar(const ScalarArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const Format f = c.format == "csv" ? Format::csv : Format::md;
  double limit = 0.0;
  bool known = false;
  ScalarWindow w = scalar_window(a, a.terms, limit, known);
  ScalarOutcome o;
  try {
    o = apply_scalar(w, a, f);
  } catch (const BreakdownError& e) {
    err << "breakdown before any estimate: " << e.what() << '\n';
    return kNoResult;
  }
  for (const auto& wmsg : o.warnings) err << "warning: " << wmsg << '\n';

  // Stagnation: the gain over the raw terms should grow with the window;
  // below 1.5× over four more terms it is at best algebraic.
  // Without a known limit, errors are proxied by the change from one term
  // fewer. Compared against the window four terms shorter.
  auto estimate_at = [&](std::size_t len) { return apply_scalar(w.slice(w.base_index(), len), a, f).est.value; };
  auto gain_at = [&](std::size_t len) {
    double raw, acc;
    if (known) {
      raw = std::fabs(w[len - 1] - limit);
      acc = std::fabs((len == w.size() ? o.est.value : estimate_at(len)) - limit);
    } else {
      raw = std::fabs(w[len - 1] - w[len - 2]);
      acc = std::fabs((len == w.size() ? o.est.value : estimate_at(len)) - estimate_at(len - 1));
    }
    return acc > 0 ? raw / acc : INFINITY;
  };
  double acc = known ? std::fabs(o.est.value - limit) : NAN;
  std::string diagnostic;
  if (w.size() >= 8) {
    try {
      double gain = gain_at(w.size());
      double gain2 = gain_at(w.size() - 4);
      // an estimate already at rounding level is not stagnating
      double resolved = 1e-10 * std::max(1.0, std::fabs(o.est.value));
      double current = known ? acc : std::fabs(w[w.size() - 1] - w[w.size() - 2]) / gain;
      if (std::isfinite(gain) && current > resolved && (gain < 2.0 || gain < 1.5 * gain2)) {
        std::ostringstream os;
        os << "stagnation: gain over the raw terms is " << gain << " with " << w.size() << " terms and " << gain2
           << " with " << w.size() - 4 << "; the transform is not accelerating this sequence";
        diagnostic = os.str();
      }
    } catch (const AccelError&) {
    }
  }

  std::ostringstream os;
  os << o.column_text;
  auto line = [&](const std::string& key, const std::string& value) {
    if (f == Format::csv) os << key << ',' << value << '\n';
    else os << key << ": " << value << '\n';
  };
  if (f == Format::md) os << '\n';
  line("method", a.method);
  line("terms", std::to_string(w.size()));
  line("estimate", driver::format_double(o.est.value));
  line("order", std::to_string(o.est.order));
  line("breakdowns", std::to_string(o.breakdowns));
  if (known) line("error", driver::format_double(acc));
  if (!diagnostic.empty()) line("diagnostic", diagnostic);
  emit(os.str(), c, out);
  return kOk;
}

int cmd_solve(const ProblemSpec& ps, CycleConfig cfg, const Common& c, std::ostream& out, std::ostream& err) {
  cfg.tol = c.tol;
  cfg.max_cycles = c.max_cycles;
  ProblemSpec p = ps;
  p.seed = c.seed;
  auto prob = build_problem(p, cfg);
  for (const auto& w : prob.warnings) err << "warning: " << w << '\n';
  RunReport r;
  try {
    r = driver::run_cycles(prob, cfg);
  } catch (const driver::DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kNoResult;
  }
  if (r.fallbacks > 0) err << "note: " << r.fallbacks << " cycle(s) fell back to the last iterate\n";
  emit(format_reports({r}, c.format == "csv" ? Format::csv : Format::md), c, out);
  return r.converged() ? kOk : kNoResult;
}

struct IllposedArgs {
  std::size_t n = 200;
  double decay = 1.0;
  double noise = 1e-2;
  int kmax = 60;
};

int cmd_illposed(const IllposedArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  auto model = problems::illposed_synthetic(a.n, a.decay, a.noise, c.seed);
  auto r = illposed::rre_tsvd(model, a.kmax);
  Vec norms;
  for (const auto& s : r.steps) norms.push_back(s.residual_norm);
  int selected = illposed::select_truncation_index(norms);
  int kopt = illposed::tsvd_optimal_index(model);
  std::ostringstream os;
  if (c.format == "csv") {
    os << illposed::to_csv(model, r);
    err << "k_selected=" << selected << " k_opt=" << kopt << '\n';
  } else {
    std::istringstream csv(illposed::to_csv(model, r));
    std::string row;
    std::getline(csv, row);
    os << "| k | residual | rel_err_tsvd | rel_err_rre |\n|---|---|---|---|\n";
    while (std::getline(csv, row)) {
      std::replace(row.begin(), row.end(), ',', '|');
      os << "| " << row << " |\n";
    }
    os << "\nk_selected: " << selected << "\nk_opt: " << kopt << '\n';
  }
  emit(os.str(), c, out);
  return kOk;
}

int cmd_bench(BenchSpec spec, const Common& c, std::ostream& out, std::ostream& err) {
  spec.config.tol = c.tol;
  spec.config.max_cycles = c.max_cycles;
  spec.problem.seed = c.seed;
  spec.format = c.format == "csv" ? Format::csv : Format::md;
  auto rows = run_bench(spec, thread_cap());
  emit(format_reports(rows, spec.format), c, out);
  std::size_t failed = 0;
  for (const auto& r : rows)
    if (!r.error.empty()) {
      ++failed;
      err << r.method << ": " << r.error << '\n';
    }
  return failed == rows.size() ? kAllFailed : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"accelerant: sequence transformations and extrapolated fixed-point solvers"};
  app.require_subcommand(1);

  Common common;
  ScalarArgs sa;
  auto* sc = app.add_subcommand("scalar", "apply a scalar transform to a sequence");
  auto* src = sc->add_option_group("source");
  src->add_option("--series", sa.series, "log2 | leibniz | logseq | geom")
      ->check(CLI::IsMember({"log2", "leibniz", "leibniz_pi", "logseq", "logarithmic", "geom", "geometric_mixture"}));
  src->add_option("--input", sa.input, "sequence file, one term per line")->check(CLI::ExistingFile);
  src->require_option(1);
  sc->add_option("--method", sa.method, "transform")->check(CLI::IsMember(scalar::transform_names()));
  sc->add_option("--terms", sa.terms, "number of terms (default 15 for series, all for files)")
      ->check(CLI::Range(1, 100000));
  sc->add_option("--k", sa.k, "maximum order");
  sc->add_option("--nodes", sa.nodes, "richardson / e-algorithm nodes: harmonic (1/(n+1)) or halving (2^-n)")
      ->check(CLI::IsMember({"harmonic", "halving"}));
  add_common(sc, common);

  ProblemSpec ps;
  CycleConfig cfg;
  auto* so = app.add_subcommand("solve", "run one accelerated fixed-point solve");
  add_problem(so, ps);
  add_cycle(so, cfg);
  so->add_option("--method", cfg.method, "driver method")->check(CLI::IsMember(driver::driver_methods()));
  add_common(so, common);

  IllposedArgs ia;
  auto* il = app.add_subcommand("illposed", "TSVD with RRE post-processing on a synthetic ill-posed problem");
  il->add_option("--n", ia.n, "dimension")->check(CLI::Range(3, 1200));
  il->add_option("--decay", ia.decay, "σ_j = exp(-decay·j)")->check(CLI::PositiveNumber);
  il->add_option("--noise", ia.noise, "relative noise level ν")->check(CLI::NonNegativeNumber);
  il->add_option("--kmax", ia.kmax, "largest k")->check(CLI::PositiveNumber);
  add_common(il, common);

  BenchSpec bs;
  std::vector<std::string> methods;
  auto* be = app.add_subcommand("bench", "compare methods on one problem");
  add_problem(be, bs.problem);
  add_cycle(be, bs.config);
  be->add_option("--methods", methods, "comma-separated driver methods")
      ->delimiter(',')
      ->required()
      ->check(CLI::IsMember(driver::driver_methods()));
  add_common(be, common);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    if (code == 0) return kOk;
    auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  try {
    if (sc->parsed()) return cmd_scalar(sa, common, out, err);
    if (so->parsed()) return cmd_solve(ps, cfg, common, out, err);
    if (il->parsed()) return cmd_illposed(ia, common, out, err);
    bs.methods = methods;
    return cmd_bench(bs, common, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace accel::cli
