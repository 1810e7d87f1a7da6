#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gani {

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  // Appends one row; `values.size()` must equal cols().
  void append_row(std::span<const double> values);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets;  // rows + 1 entries
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }

  Matrix to_dense() const;
  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

// out = a * b for sparse a.
Matrix multiply(const CsrMatrix& a, const Matrix& b);
// out = a * b, dense.
Matrix multiply(const Matrix& a, const Matrix& b);
// out = a^T * b, dense.
Matrix multiply_transposed(const Matrix& a, const Matrix& b);
// out = a^T * b for sparse a.
Matrix multiply_transposed(const CsrMatrix& a, const Matrix& b);

// Builds a CSR view of the non-zero entries of a dense matrix.
CsrMatrix sparsify(const Matrix& dense);

}  // namespace gani
