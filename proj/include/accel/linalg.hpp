#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

#include "accel/core.hpp"

namespace accel::linalg {

class RankDeficientError : public AccelError {
 public:
  using AccelError::AccelError;
};

class SingularMatrixError : public AccelError {
 public:
  using AccelError::AccelError;
};

class ConvergenceError : public AccelError {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : AccelError(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Column-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Row-wise literal, e.g. {{1, 2}, {3, 4}}.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_columns(const std::vector<Vec>& columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return a_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[j * rows_ + i]; }

  double* col_data(std::size_t j) { return a_.data() + j * rows_; }
  const double* col_data(std::size_t j) const { return a_.data() + j * rows_; }
  Vec col(std::size_t j) const;
  void set_col(std::size_t j, const Vec& v);
  const std::vector<double>& data() const { return a_; }

  DenseMatrix transpose() const;
  // Leading columns [0, count).
  DenseMatrix leading_cols(std::size_t count) const;
  double frobenius() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Vec multiply(const DenseMatrix& a, const Vec& x);
// Aᵀx
Vec multiply_transposed(const DenseMatrix& a, const Vec& x);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

struct QrFactors {
  DenseMatrix q;
  DenseMatrix r;
};

// Modified Gram–Schmidt with one reorthogonalization pass. Throws
// RankDeficientError when a diagonal of R fails the breakdown check
// against the original column norm.
QrFactors qr_mgs(const DenseMatrix& a, const BreakdownPolicy& policy = {});

struct LuFactors {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
  double growth = 1.0;  // max |U| / max |A|
  int sign = 1;
};

LuFactors lu_factor(const DenseMatrix& a, const BreakdownPolicy& policy = {});
DenseMatrix lu_solve(const LuFactors& f, const DenseMatrix& b);
DenseMatrix lu_solve(const DenseMatrix& a, const DenseMatrix& b,
                     const BreakdownPolicy& policy = {});
Vec lu_solve(const DenseMatrix& a, const Vec& b,
             const BreakdownPolicy& policy = {});
// Partial-pivot elimination; exact zero pivots give 0.
double determinant(const DenseMatrix& a);

struct LeastSquaresResult {
  Vec coeffs;
  double residual_norm = 0.0;
  bool rank_deficient = false;
  std::size_t rank = 0;
};

// min ‖b − Aθ‖₂. Full-rank problems go through qr_mgs; rank deficiency
// falls back to a truncated-SVD minimum-norm solution and is flagged.
LeastSquaresResult least_squares(const DenseMatrix& a, const Vec& b,
                                 const BreakdownPolicy& policy = {});

struct SvdFactors {
  DenseMatrix u;  // rows × cols
  Vec sigma;      // descending
  DenseMatrix v;  // cols × cols
  int sweeps = 0;
};

// One-sided (Hestenes) Jacobi. Requires rows ≥ cols and cols ≤ 1200.
SvdFactors jacobi_svd(const DenseMatrix& a, double tol = 1e-14,
                      int max_sweeps = 60);

using Applicator = std::function<Vec(const Vec&)>;

struct GmresResult {
  Vec residual_norms;  // j = 0..k (or up to the happy breakdown)
  bool exact = false;
};

// Arnoldi + small least squares over K_j(A, b) from x0 = 0.
GmresResult gmres_oracle(const Applicator& a, const Vec& b, int k);

}  // namespace accel::linalg
