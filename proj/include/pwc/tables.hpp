#pragma once

#include <cstddef>
#include <sstream>
#include <vector>

#include "pwc/errors.hpp"

namespace pwc {

/// Coefficients c_{i,j} for i, j >= 0 and i + j <= degree, stored densely on
/// a (degree+1) x (degree+1) grid. Reads outside the triangle (including
/// negative indices) yield zero through get(); at() rejects them.
template <class T>
class TriangularTable {
 public:
  TriangularTable() = default;
  explicit TriangularTable(int degree)
      : degree_(degree), data_(static_cast<std::size_t>((degree + 1) * (degree + 1)), T(0)) {
    if (degree < 0) throw IndexError("TriangularTable: negative degree");
  }

  int degree() const { return degree_; }

  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i + j <= degree_; }

  const T& at(int i, int j) const {
    check(i, j);
    return data_[offset(i, j)];
  }
  T& at(int i, int j) {
    check(i, j);
    return data_[offset(i, j)];
  }

  T get(int i, int j) const { return in_range(i, j) ? data_[offset(i, j)] : T(0); }

  /// Number of (i, j) slots inside the triangle.
  std::size_t size() const {
    return static_cast<std::size_t>((degree_ + 1) * (degree_ + 2) / 2);
  }

  template <class F>
  void for_each(F&& fn) const {
    for (int total = 0; total <= degree_; ++total) {
      for (int i = total; i >= 0; --i) fn(i, total - i, data_[offset(i, total - i)]);
    }
  }

  template <class F>
  void for_each(F&& fn) {
    for (int total = 0; total <= degree_; ++total) {
      for (int i = total; i >= 0; --i) fn(i, total - i, data_[offset(i, total - i)]);
    }
  }

  template <class U, class F>
  TriangularTable<U> map(F&& fn) const {
    TriangularTable<U> out(degree_);
    for_each([&](int i, int j, const T& v) { out.at(i, j) = fn(v); });
    return out;
  }

  friend bool operator==(const TriangularTable&, const TriangularTable&) = default;

 private:
  std::size_t offset(int i, int j) const {
    return static_cast<std::size_t>(i * (degree_ + 1) + j);
  }
  void check(int i, int j) const {
    if (!in_range(i, j)) {
      std::ostringstream msg;
      msg << "table index (" << i << ", " << j << ") outside degree " << degree_;
      throw IndexError(msg.str());
    }
  }

  int degree_ = 0;
  std::vector<T> data_ = std::vector<T>(1, T(0));
};

/// sum_{i+j <= n} c_{i,j} x^i y^j
inline double evaluate(const TriangularTable<double>& table, double x, double y) {
  double total = 0.0;
  double x_pow = 1.0;
  for (int i = 0; i <= table.degree(); ++i) {
    double row = 0.0;
    double y_pow = 1.0;
    for (int j = 0; i + j <= table.degree(); ++j) {
      row += table.get(i, j) * y_pow;
      y_pow *= y;
    }
    total += row * x_pow;
    x_pow *= x;
  }
  return total;
}

}  // namespace pwc
