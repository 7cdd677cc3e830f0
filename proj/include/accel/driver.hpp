#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "accel/core.hpp"
#include "accel/linalg.hpp"

namespace accel::driver {

struct FixedPointProblem {
  std::string name;
  std::size_t dim = 0;
  std::function<Vec(const Vec&)> map;  // u ↦ G(u); must return dim entries
  Vec initial;
  std::optional<Vec> exact;
  // Applied to every extrapolated or iterated point when set (PageRank
  // renormalizes onto the simplex).
  std::function<void(Vec&)> renormalize;
  std::vector<std::string> warnings;

  Vec residual(const Vec& u) const;  // F(u) = G(u) − u
};

class DivergenceError : public AccelError {
 public:
  using AccelError::AccelError;
};

enum class StopRule {
  relative_to_initial,  // ‖F(u)‖ / ‖F(u_0)‖
  relative_to_iterate,  // ‖F(u)‖ / ‖u‖
};

struct CycleConfig {
  std::string method = "rre";
  int warmup = 0;  // p
  int width = 5;   // m
  double tol = 1e-6;
  int max_cycles = 100000;
  long max_evaluations = 50'000'000;
  double damping = 1.0;  // Picard and Anderson β
  int depth = 5;         // Anderson m
  // MMPE / Sβ, N×m. Without it cycle c uses the canonical block
  // e_{(c−1)m+1} .. e_{cm} (indices mod N): a fixed Y stalls under restarts,
  // since the restart residual is already orthogonal to it.
  std::optional<linalg::DenseMatrix> test_vectors;
  std::optional<Vec> tea_y;  // defaults to Δs_0 of each cycle
  StopRule stop = StopRule::relative_to_initial;
  bool norm_one = false;  // measure residuals in the 1-norm
  BreakdownPolicy policy;

  void validate() const;
};

struct RunReport {
  std::string method;
  std::size_t n = 0;
  int p = 0;
  int m = 0;
  double tol = 0.0;
  int cycles = 0;
  long iterations = 0;  // map evaluations
  double final_residual = 0.0;
  std::vector<double> residual_history;  // one entry per recorded cycle
  double seconds = 0.0;
  std::string termination;  // converged | warmup | max_cycles | max_evaluations
  Vec solution;
  int fallbacks = 0;  // cycles whose extrapolation did not exist
  std::string error;  // set for failed bench rows

  bool converged() const { return termination == "converged" || termination == "warmup"; }
};

// true iff residual / initial <= tol; a zero initial residual counts as converged.
bool convergence_check(double residual, double initial, double tol);

RunReport run_cycles(const FixedPointProblem& problem, const CycleConfig& config);

std::vector<std::string> driver_methods();

// CSV columns: method,N,p,m,tol,cycles,iterations,final_residual,seconds
std::string csv_header();
std::string to_csv_row(const RunReport& r);
RunReport parse_csv_row(const std::string& line);
std::string format_double(double v);

}  // namespace accel::driver
