#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace accel {

using Vec = std::vector<double>;

class AccelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Near-zero denominator in a recursion or elimination.
class BreakdownError : public AccelError {
 public:
  using AccelError::AccelError;
};

class DimensionError : public AccelError {
 public:
  using AccelError::AccelError;
};

class InsufficientTermsError : public AccelError {
 public:
  using AccelError::AccelError;
};

// Extrapolated value or approximant does not exist (singular projected system).
class NonexistenceError : public AccelError {
 public:
  using AccelError::AccelError;
};

class ParseError : public AccelError {
 public:
  ParseError(const std::string& what, int line) : AccelError(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// ---- small vector kernels -------------------------------------------------

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm1(const Vec& a);
double norm_inf(const Vec& a);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double s);
// y += a*x
void axpy(Vec& y, double a, const Vec& x);

// ---- term traits so windows and tableaux can hold scalars or vectors ------

inline std::size_t term_dim(double) { return 1; }
inline std::size_t term_dim(const Vec& v) { return v.size(); }
inline double term_sub(double a, double b) { return a - b; }
inline Vec term_sub(const Vec& a, const Vec& b) { return sub(a, b); }
inline double term_abs(double a) { return a < 0 ? -a : a; }
inline double term_abs(const Vec& a) { return norm2(a); }

// ---- breakdown policy -----------------------------------------------------

enum class BreakdownAction { error, skip_entry };

struct BreakdownPolicy {
  double relative_threshold = 1e-12;
  BreakdownAction action = BreakdownAction::skip_entry;

  void validate() const;
};

// True when the denominator is usable. Fails iff
// |denominator| <= threshold * max(local_scale, smallest normal).
bool breakdown_check(double denominator, double local_scale,
                     const BreakdownPolicy& policy = {});

// ---- sequence window ------------------------------------------------------

template <class T>
class SequenceWindow {
 public:
  SequenceWindow() = default;
  explicit SequenceWindow(std::vector<T> terms, int base_index = 0);

  SequenceWindow& push(T term);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  int base_index() const { return base_; }
  // Index one past the last stored term.
  int end_index() const { return base_ + static_cast<int>(terms_.size()); }
  std::size_t dim() const { return terms_.empty() ? 0 : term_dim(terms_.front()); }

  // Term s_n by absolute index n.
  const T& at(int n) const;
  const T& operator[](std::size_t i) const { return terms_[i]; }
  const std::vector<T>& terms() const { return terms_; }

  // Δ^j s_n by the recursion Δ^j s_n = Δ^{j−1}s_{n+1} − Δ^{j−1}s_n.
  T difference(int j, int n) const;

  // Terms n .. n+count-1 as a new window starting at n.
  SequenceWindow slice(int n, std::size_t count) const;

 private:
  std::vector<T> terms_;
  int base_ = 0;
};

using ScalarWindow = SequenceWindow<double>;
using VectorWindow = SequenceWindow<Vec>;

template <class T>
SequenceWindow<T> push_term(SequenceWindow<T> window, T term) {
  window.push(std::move(term));
  return window;
}

template <class T>
T forward_difference(const SequenceWindow<T>& window, int j, int n) {
  return window.difference(j, n);
}

// ---- estimate -------------------------------------------------------------

template <class T>
struct Estimate {
  T value{};
  int order = 0;
  int pilot_index = 0;
  std::map<std::string, double> diagnostics;
};

// ---- tableau --------------------------------------------------------------

// Column k of a recursion table: entries for n = base .. base+size-1.
// Broken entries keep a default value and a set flag.
template <class T>
struct TableauColumn {
  std::vector<T> values;
  std::vector<char> broken;
  int base = 0;

  std::size_t size() const { return values.size(); }
};

// Entries indexed (k, n) for k >= -1. With stride 2 the even columns are the
// estimates and are always retained, and odd (auxiliary) columns are evicted
// once no longer needed unless the tableau is in full mode. With stride 1
// every column is an estimate and nothing is evicted.
template <class T>
class Tableau {
 public:
  explicit Tableau(bool full = false, int estimate_stride = 2)
      : full_(full || estimate_stride == 1), stride_(estimate_stride) {}

  void set_column(int k, TableauColumn<T> column);

  int max_order() const { return max_k_; }
  bool stored(int k) const;
  bool exists(int k, int n) const;
  bool broken(int k, int n) const;
  // Throws BreakdownError on flagged entries, std::out_of_range if absent.
  const T& at(int k, int n) const;
  const TableauColumn<T>& column(int k) const;

  // Deepest estimate column with a valid entry; within it, the valid entry
  // with the largest n. Throws BreakdownError if nothing beyond column 0
  // exists.
  Estimate<T> best_estimate() const;
  // Column k is stored and holds at least one valid entry.
  bool has_estimate(int k) const;
  int estimate_stride() const { return stride_; }

  std::size_t breakdown_count() const { return breakdowns_; }
  std::vector<std::string>& warnings() { return warnings_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool full() const { return full_; }

 private:
  bool full_;
  int stride_;
  int max_k_ = -1;
  std::size_t breakdowns_ = 0;
  std::map<int, TableauColumn<T>> cols_;
  std::vector<std::string> warnings_;
};

using ScalarTableau = Tableau<double>;
using VectorTableau = Tableau<Vec>;

// ---- sequence files -------------------------------------------------------

// One term per line; comma-separated components for vectors; '#' comments.
VectorWindow parse_sequence(std::istream& in);
VectorWindow load_sequence(const std::string& path);
// Requires dimension 1.
ScalarWindow to_scalar(const VectorWindow& window);

extern template class SequenceWindow<double>;
extern template class SequenceWindow<Vec>;
extern template class Tableau<double>;
extern template class Tableau<Vec>;

}  // namespace accel
