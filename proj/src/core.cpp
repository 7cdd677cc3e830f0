#include "accel/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace accel {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) {
  // scaled accumulation avoids overflow for large entries
  double scale = 0.0, ssq = 1.0;
  for (double x : a) {
    if (x == 0.0) continue;
    double ax = std::fabs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double norm1(const Vec& a) {
  double s = 0.0;
  for (double x : a) s += std::fabs(x);
  return s;
}

double norm_inf(const Vec& a) {
  double s = 0.0;
  for (double x : a) s = std::max(s, std::fabs(x));
  return s;
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("add: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("sub: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

void axpy(Vec& y, double a, const Vec& x) {
  if (y.size() != x.size()) throw DimensionError("axpy: size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void BreakdownPolicy::validate() const {
  if (!(relative_threshold > 0.0))
    throw std::invalid_argument("breakdown threshold must be positive");
}

bool breakdown_check(double denominator, double local_scale,
                     const BreakdownPolicy& policy) {
  double scale = std::max(local_scale, std::numeric_limits<double>::min());
  return std::fabs(denominator) > policy.relative_threshold * scale;
}

// ---- SequenceWindow -------------------------------------------------------

template <class T>
SequenceWindow<T>::SequenceWindow(std::vector<T> terms, int base_index)
    : base_(base_index) {
  for (auto& t : terms) push(std::move(t));
}

template <class T>
SequenceWindow<T>& SequenceWindow<T>::push(T term) {
  std::size_t d = term_dim(term);
  if (d == 0) throw DimensionError("sequence term has dimension 0");
  if (!terms_.empty() && d != dim())
    throw DimensionError("term dimension " + std::to_string(d) +
                         " does not match window dimension " +
                         std::to_string(dim()));
  terms_.push_back(std::move(term));
  return *this;
}

template <class T>
const T& SequenceWindow<T>::at(int n) const {
  if (n < base_ || n >= end_index())
    throw InsufficientTermsError("term s_" + std::to_string(n) +
                                 " not in window");
  return terms_[static_cast<std::size_t>(n - base_)];
}

template <class T>
T SequenceWindow<T>::difference(int j, int n) const {
  if (j < 0) throw std::invalid_argument("negative difference order");
  if (n < base_ || n + j >= end_index())
    throw InsufficientTermsError("Δ^" + std::to_string(j) + " s_" +
                                 std::to_string(n) + " needs terms up to s_" +
                                 std::to_string(n + j));
  std::vector<T> row(terms_.begin() + (n - base_),
                     terms_.begin() + (n - base_) + j + 1);
  for (int level = 0; level < j; ++level)
    for (std::size_t i = 0; i + 1 < row.size() - level; ++i)
      row[i] = term_sub(row[i + 1], row[i]);
  return row[0];
}

template <class T>
SequenceWindow<T> SequenceWindow<T>::slice(int n, std::size_t count) const {
  if (n < base_ || n + static_cast<int>(count) > end_index())
    throw InsufficientTermsError("slice outside window");
  auto first = terms_.begin() + (n - base_);
  return SequenceWindow(std::vector<T>(first, first + count), n);
}

template class SequenceWindow<double>;
template class SequenceWindow<Vec>;

// ---- Tableau --------------------------------------------------------------

template <class T>
void Tableau<T>::set_column(int k, TableauColumn<T> column) {
  for (char b : column.broken)
    if (b) ++breakdowns_;
  cols_[k] = std::move(column);
  max_k_ = std::max(max_k_, k);
  if (!full_) {
    // keep even columns and the two most recent columns
    for (auto it = cols_.begin(); it != cols_.end();) {
      int c = it->first;
      bool odd = (c % 2) != 0;
      if (odd && c < max_k_ - 1)
        it = cols_.erase(it);
      else
        ++it;
    }
  }
}

template <class T>
bool Tableau<T>::stored(int k) const {
  return cols_.count(k) != 0;
}

template <class T>
bool Tableau<T>::exists(int k, int n) const {
  auto it = cols_.find(k);
  if (it == cols_.end()) return false;
  int i = n - it->second.base;
  return i >= 0 && i < static_cast<int>(it->second.size());
}

template <class T>
bool Tableau<T>::broken(int k, int n) const {
  if (!exists(k, n)) return false;
  const auto& c = cols_.at(k);
  return c.broken[static_cast<std::size_t>(n - c.base)] != 0;
}

template <class T>
const T& Tableau<T>::at(int k, int n) const {
  if (!exists(k, n))
    throw std::out_of_range("tableau entry (" + std::to_string(k) + ", " +
                            std::to_string(n) + ") not stored");
  const auto& c = cols_.at(k);
  auto i = static_cast<std::size_t>(n - c.base);
  if (c.broken[i])
    throw BreakdownError("tableau entry (" + std::to_string(k) + ", " +
                         std::to_string(n) + ") is flagged");
  return c.values[i];
}

template <class T>
const TableauColumn<T>& Tableau<T>::column(int k) const {
  auto it = cols_.find(k);
  if (it == cols_.end())
    throw std::out_of_range("tableau column " + std::to_string(k) +
                            " not stored");
  return it->second;
}

template <class T>
bool Tableau<T>::has_estimate(int k) const {
  auto it = cols_.find(k);
  if (it == cols_.end()) return false;
  for (char b : it->second.broken)
    if (!b) return true;
  return false;
}

template <class T>
Estimate<T> Tableau<T>::best_estimate() const {
  int top = stride_ == 2 ? max_k_ - (max_k_ % 2 != 0 ? 1 : 0) : max_k_;
  for (int k = top; k >= stride_; k -= stride_) {
    auto it = cols_.find(k);
    if (it == cols_.end()) continue;
    const auto& c = it->second;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
      if (c.broken[static_cast<std::size_t>(i)]) continue;
      Estimate<T> e;
      e.value = c.values[static_cast<std::size_t>(i)];
      e.order = k;
      e.pilot_index = c.base + i;
      return e;
    }
  }
  throw BreakdownError("no transformed estimate available");
}

template class Tableau<double>;
template class Tableau<Vec>;

// ---- sequence files -------------------------------------------------------

VectorWindow parse_sequence(std::istream& in) {
  VectorWindow w;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    Vec term;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      auto a = field.find_first_not_of(" \t");
      auto b = field.find_last_not_of(" \t");
      if (a == std::string::npos)
        throw ParseError("empty component on line " + std::to_string(lineno),
                         lineno);
      std::string tok = field.substr(a, b - a + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw ParseError("bad number '" + tok + "' on line " +
                             std::to_string(lineno),
                         lineno);
      term.push_back(v);
    }
    try {
      w.push(std::move(term));
    } catch (const DimensionError& e) {
      throw ParseError(std::string(e.what()) + " on line " +
                           std::to_string(lineno),
                       lineno);
    }
  }
  return w;
}

VectorWindow load_sequence(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path, 0);
  return parse_sequence(f);
}

ScalarWindow to_scalar(const VectorWindow& window) {
  if (!window.empty() && window.dim() != 1)
    throw DimensionError("expected a scalar sequence, got dimension " +
                         std::to_string(window.dim()));
  ScalarWindow s({}, window.base_index());
  for (const auto& t : window.terms()) s.push(t[0]);
  return s;
}

}  // namespace accel
