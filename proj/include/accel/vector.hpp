#pragma once

#include <optional>
#include <string>
#include <vector>

#include "accel/core.hpp"
#include "accel/linalg.hpp"
#include "accel/scalar.hpp"

namespace accel::vector {

// All transforms below extrapolate at the first term of the window,
// n = window.base_index(). Slice the window to move the pilot index.

enum class VpeKind { mpe, rre, mmpe };

struct VpeMethod {
  VpeKind kind = VpeKind::rre;
  // N×k test vectors for MMPE; the first k canonical vectors when empty.
  std::optional<linalg::DenseMatrix> test_vectors;
};

struct VpeResult {
  Vec value;     // t_k
  Vec gamma;     // weights over s_n..s_{n+k}, Σγ = 1
  Vec residual;  // r̃(t_k) = Σ γ_j Δs_{n+j}
  double residual_norm = 0.0;
  int order = 0;
  bool rank_deficient = false;
  // cos_theta: angle between r̃_0 = Δs_n and its orthogonal projection on
  // span Δ²S. cos_angle: angle between r̃_0 and r̃_0 − r̃(t_k).
  std::map<std::string, double> diagnostics;
};

// Δs_n + Σ a_i Δ²s_{n+i−1}, i = 1..k
Vec generalized_residual(const VectorWindow& window, const Vec& a);

// Needs s_n..s_{n+k+1}. Throws NonexistenceError when the projected
// system is singular (MPE, MMPE).
VpeResult vpe_extrapolate(const VectorWindow& window, const VpeMethod& method,
                          int k, const BreakdownPolicy& policy = {});

// Determinant-ratio evaluation from the α_{i,j} inner-product table, k ≤ 6.
Vec vpe_oracle(const VectorWindow& window, const VpeMethod& method, int k);

// Sβ recursion with y_1..y_k; needs s_n..s_{n+k+1}.
Estimate<Vec> sbeta(const VectorWindow& window, const std::vector<Vec>& y,
                    const BreakdownPolicy& policy = {});

struct HAlgorithmResult {
  VectorTableau h;  // column k holds H_k^{(n)}
};

HAlgorithmResult h_algorithm(const VectorWindow& window,
                             const scalar::BasisFamily& basis, int k_max,
                             const BreakdownPolicy& policy = {});

struct VeaOptions {
  bool full = false;
  BreakdownPolicy policy;
};

// Vector ε-algorithm with the Samelson inverse z/‖z‖².
VectorTableau vea(const VectorWindow& window, const VeaOptions& options = {});

struct TeaResult {
  Vec value;   // e_k(s_n)
  Vec second;  // same weights applied to s_{n+k}..s_{n+2k}
  Vec coefficients;  // a_1..a_k
  Vec gamma;         // weights over s_n..s_{n+k}
  int order = 0;
};

// Needs s_n..s_{n+2k}. Throws NonexistenceError when T_{k,n} is singular.
TeaResult tea(const VectorWindow& window, const Vec& y, int k,
              const BreakdownPolicy& policy = {});

// The ε̂ recursion of the topological ε-algorithm; even columns are e_k.
VectorTableau topological_epsilon(const VectorWindow& window, const Vec& y,
                                  const VeaOptions& options = {});

// Simplified topological ε-algorithms driven by the scalar ε-table of
// z_n = (y, s_n). Needs s_n..s_{n+2k}.
Estimate<Vec> stea(const VectorWindow& window, const Vec& y, int k, int variant,
                   const BreakdownPolicy& policy = {});

// ---- Anderson acceleration -------------------------------------------------

struct AndersonState {
  int depth = 5;         // m
  double damping = 1.0;  // β
  std::vector<Vec> x;    // recent iterates; x.back() is the current one
  std::vector<Vec> f;    // residuals F_i = G(x_i) − x_i aligned with x
  int k = 0;             // steps taken

  static AndersonState start(Vec x0, int depth, double damping = 1.0);
  const Vec& current() const { return x.back(); }
};

struct AndersonStep {
  AndersonState state;
  Vec next;
  Vec theta;
  Vec y;     // x_k − ΔX θ
  Vec fbar;  // F_k − ΔF θ
  int used_columns = 0;
  int dropped = 0;  // oldest columns removed for rank deficiency
};

// gx = G(current iterate)
AndersonStep anderson_step(AndersonState state, const Vec& gx,
                           const BreakdownPolicy& policy = {});

std::vector<std::string> method_names();

}  // namespace accel::vector
