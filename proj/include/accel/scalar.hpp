#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "accel/core.hpp"

namespace accel::scalar {

// s_n = limit + Σ c_j λ_j^n
struct KernelModel {
  struct Mode {
    double c;
    double lambda;
  };
  double limit = 0.0;
  std::vector<Mode> modes;

  double term(int n) const;
  ScalarWindow window(std::size_t count, int base = 0) const;
};

// Interpolation nodes x_n, indexed from the window base.
class NodeSequence {
 public:
  NodeSequence() = default;
  explicit NodeSequence(std::vector<double> x) : x_(std::move(x)) {}

  // x_n = n + 1
  static NodeSequence standard(std::size_t count);
  // x_n = 2^{−p n}, the step-halving nodes of Romberg-type tables
  static NodeSequence step_halving(int p, std::size_t count);

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  const std::vector<double>& values() const { return x_; }

  // Throws std::invalid_argument unless 0 < x_0 < x_1 < ...
  void validate_increasing() const;

 private:
  std::vector<double> x_;
};

// g_i(n) for i = 1..k_max
using BasisFamily = std::function<double(int i, int n)>;

struct RationalFunction {
  Vec p;  // P_0..P_m
  Vec q;  // Q_0..Q_n, Q_0 = 1

  double operator()(double z) const;
};

Estimate<double> aitken_step(double s0, double s1, double s2,
                             const BreakdownPolicy& policy = {});

struct IteratedAitken {
  // levels[0] holds the input; level k has entries for n = base..
  std::vector<std::vector<double>> levels;
  int base = 0;
  int levels_completed = 0;
  std::optional<int> breakdown_level;

  // Last entry of the deepest completed level.
  Estimate<double> estimate() const;
};

IteratedAitken iterated_aitken(const ScalarWindow& window, int max_k,
                               const BreakdownPolicy& policy = {});

struct RichardsonOptions {
  // Ratios x_{n+1}/x_n inside [lo, hi] trigger a warning.
  double ratio_lo = 0.9;
  double ratio_hi = 1.0 / 0.9;
  BreakdownPolicy policy;
};

// Column k holds t_k^{(n)}; every column is an estimate.
ScalarTableau richardson_table(const ScalarWindow& window,
                               const NodeSequence& nodes,
                               const RichardsonOptions& options = {});

// Determinant ratio with rows 1, Δs, ..., Δ^k s over columns n..n+k.
Estimate<double> shanks_oracle(const ScalarWindow& window, int k, int n,
                               const BreakdownPolicy& policy = {});

struct TableauOptions {
  bool full = false;
  BreakdownPolicy policy;
};

ScalarTableau epsilon_scalar(const ScalarWindow& window,
                             const TableauOptions& options = {});

// Default nodes x_n = n + 1 (relative to the window base).
ScalarTableau rho(const ScalarWindow& window,
                  const std::optional<NodeSequence>& nodes = std::nullopt,
                  const TableauOptions& options = {});

ScalarTableau theta(const ScalarWindow& window,
                    const TableauOptions& options = {});

struct EAlgorithmResult {
  ScalarTableau e;
  // pivots[k−1] holds g_{k−1,k}^{(n)} for n = base.. (the auxiliary column
  // used to build E_k).
  std::vector<Vec> pivots;
};

EAlgorithmResult e_algorithm(const ScalarWindow& window,
                             const BasisFamily& basis, int k_max,
                             const TableauOptions& options = {});

// Cramer form: det[s; g_1; ...; g_k] / det[1; g_1; ...; g_k] over n..n+k.
Estimate<double> e_algorithm_determinant(const ScalarWindow& window,
                                         const BasisFamily& basis, int k,
                                         int n,
                                         const BreakdownPolicy& policy = {});

// [m/n] Padé approximant from series coefficients c_0..c_{m+n}.
RationalFunction pade_approximant(const Vec& coeffs, int m, int n,
                                  const BreakdownPolicy& policy = {});

// Canonical names: aitken, aitken-iter, richardson, shanks, epsilon, rho,
// theta, e-algorithm.
const std::vector<std::string>& transform_names();

}  // namespace accel::scalar
