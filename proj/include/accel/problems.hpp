#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "accel/core.hpp"
#include "accel/driver.hpp"
#include "accel/illposed.hpp"
#include "accel/linalg.hpp"
#include "accel/scalar.hpp"

namespace accel::problems {

struct SeriesParams {
  double limit = 0.0;  // logarithmic: s_n = limit + 1/(n+1)
  scalar::KernelModel mixture{2.0, {{3.0, 0.5}}};
};

// log2 | leibniz (leibniz_pi) | logseq (logarithmic) | geom (geometric_mixture)
ScalarWindow series_generator(const std::string& name, std::size_t count, const SeriesParams& params = {});
double series_limit(const std::string& name, const SeriesParams& params = {});

struct LinearIteration {
  linalg::DenseMatrix b_mat;
  Vec b;
  Vec xstar;
  double spectral_radius = 0.0;  // estimate

  Vec apply(const Vec& s) const;  // B s + b
  VectorWindow iterate(const Vec& s0, std::size_t count) const;
  driver::FixedPointProblem as_problem(const Vec& initial) const;
};

// Nonnegative random B scaled so a 100-step power-iteration estimate of its
// spectral radius equals rho; b = (I − B)x* for a random x*.
LinearIteration linear_iteration_generator(std::size_t n, double rho, std::uint64_t seed);

// B = Q diag(eigenvalues) Qᵀ with a random orthogonal Q.
LinearIteration linear_iteration_with_spectrum(const Vec& eigenvalues, std::uint64_t seed);

// Random orthogonal n×n matrix (QR of a Gaussian matrix).
linalg::DenseMatrix random_orthogonal(std::size_t n, std::uint64_t seed);

// −Δ on a p×p interior grid with h = 1/(p+1), Dirichlet zero boundary.
Vec apply_laplacian(std::size_t p, const Vec& u);

// −Δu + u³ = f with u* = sin(πx)sin(πy) on the grid; G(u) = u + ω(b − Au − u³),
// ω = h²/5.
driver::FixedPointProblem reaction_diffusion(std::size_t p);

struct FredholmDiscretization {
  std::size_t n = 0;
  Vec x, w, f;
  linalg::DenseMatrix k;  // K(x_i, x_j)
  double lambda = 0.0;
};

FredholmDiscretization fredholm_discretization(std::size_t n, double lambda);
// u = f + λ K_h u, u_0 = f
driver::FixedPointProblem fredholm(std::size_t n, double lambda);

struct SparseGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::uint32_t>> out;  // out-edge lists
  std::vector<long long> original_ids;           // compacted id -> file id

  std::size_t edge_count() const;
  std::size_t out_degree(std::size_t i) const { return out[i].size(); }
};

// Whitespace-separated "src dst" pairs, '#' comments; ids compacted to [0, N).
SparseGraph load_edge_list(const std::string& path);
SparseGraph parse_edge_list(std::istream& in);

// Two equal blocks; a fraction `intra` of the edges stays inside a block and
// the rest cross, so P has an eigenvalue close to −(1 − 2·intra).
SparseGraph synthetic_graph(std::size_t n, double avg_out_degree, std::uint64_t seed, double intra = 0.02);

// x = αPx + (1−α)v with dangling columns sent to v = uniform; iterates are
// renormalized to sum 1.
driver::FixedPointProblem pagerank(const SparseGraph& g, double alpha = 0.85);

// σ_j = e^{−a j}; U, V from QR of seeded Gaussian matrices; v_jᵀx̂ = 1/j;
// e = ν‖b̂‖·(unit random vector).
illposed::SvdModel illposed_synthetic(std::size_t n, double a, double nu, std::uint64_t seed);

std::vector<std::string> problem_names();

}  // namespace accel::problems
