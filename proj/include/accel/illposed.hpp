#pragma once

#include <optional>
#include <string>
#include <vector>

#include "accel/core.hpp"
#include "accel/linalg.hpp"

namespace accel::illposed {

struct SvdModel {
  Vec sigma;             // σ_1 ≥ … ≥ σ_ℓ > 0
  linalg::DenseMatrix u;  // N×ℓ
  linalg::DenseMatrix v;  // N×ℓ
  Vec b;
  std::optional<Vec> b_exact;
  std::optional<Vec> x_exact;
  double noise_level = 0.0;  // ν = ‖e‖ / ‖b̂‖

  std::size_t ell() const { return sigma.size(); }
  // Checks ordering, positivity and orthonormality (1e−9).
  void validate() const;
};

// SVD of a dense matrix via jacobi_svd, dropping zero singular values.
SvdModel svd_model(const linalg::DenseMatrix& a, const Vec& b);

// δ_j = u_jᵀb / σ_j, j = 1..ℓ (index 0 holds δ_1)
Vec delta_coefficients(const SvdModel& model);

// x_k = Σ_{j≤k} δ_j v_j, 1 ≤ k ≤ ℓ
Vec tsvd_solution(const SvdModel& model, int k);

struct FilterFactors {
  Vec gamma;  // γ_0..γ_k
  Vec alpha;  // α_0..α_{k−1}; α_{j−1} filters component j
};

// From the retained coefficients δ_1..δ_{k+1}.
FilterFactors filter_factors(const Vec& delta, int k);

struct RreTsvdStep {
  int k = 0;
  Vec t;
  FilterFactors factors;
  double residual_norm = 0.0;      // 1/√(Σ_{j≤k+1} δ_j^{−2})
  double residual_norm_alt = 0.0;  // √(δ_k² γ_{k−1})
};

struct RreTsvdResult {
  std::vector<RreTsvdStep> steps;  // k = 1..k_max
  std::vector<int> retained;       // 1-based SVD indices with δ ≠ 0
  bool renumbered = false;         // some δ_j = 0 was skipped
  Vec delta;                       // retained δ values
};

// k_max ≤ (number of nonzero δ) − 1.
RreTsvdResult rre_tsvd(const SvdModel& model, int k_max);

// ‖t_{k+1} − t_k‖ from the filter factors (orthonormal v_j).
double update_norm(const RreTsvdResult& r, int k);

// Smallest k with norms[k] ≥ (1 − slack)·norms[k−1] (1-based k), else k_max.
int select_truncation_index(const Vec& norms, double slack = 1e-3);

// argmin_k ‖x_k − x̂‖ over k = 1..ℓ
int tsvd_optimal_index(const SvdModel& model);

// k, residual, rel_err_tsvd, rel_err_rre (errors blank without x̂)
std::string to_csv(const SvdModel& model, const RreTsvdResult& r);

}  // namespace accel::illposed
