#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "hypoflow/dense_matrix.hpp"
#include "hypoflow/errors.hpp"

namespace hypoflow {

/// Compressed sparse row matrix with real entries.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  /// Duplicate (row, col) pairs are summed; exact zeros are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    SparseMatrix m(rows, cols);
    for (std::size_t k = 0; k < t.size();) {
      std::size_t e = k;
      double v = 0.0;
      while (e < t.size() && t[e].row == t[k].row && t[e].col == t[k].col) v += t[e++].value;
      if (t[k].row >= rows || t[k].col >= cols) throw DomainError("sparse matrix: triplet out of range");
      if (v != 0.0) {
        m.col_.push_back(t[k].col);
        m.val_.push_back(v);
        ++m.row_ptr_[t[k].row + 1];
      }
      k = e;
    }
    for (std::size_t i = 0; i < rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return val_.size(); }

  template <typename T>
  std::vector<T> apply(std::span<const T> x) const {
    if (x.size() != cols_) throw DomainError("sparse matvec: dimension mismatch");
    std::vector<T> y(rows_, T{});
    for (std::size_t i = 0; i < rows_; ++i) {
      T s{};
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += val_[p] * x[col_[p]];
      y[i] = s;
    }
    return y;
  }

  SparseMatrix transposed() const {
    std::vector<Triplet> t;
    t.reserve(val_.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) t.push_back({col_[p], i, val_[p]});
    return from_triplets(cols_, rows_, std::move(t));
  }

  RealMatrix to_dense() const {
    RealMatrix d(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d(i, col_[p]) += val_[p];
    return d;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) f(i, col_[p], val_[p]);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

}  // namespace hypoflow
