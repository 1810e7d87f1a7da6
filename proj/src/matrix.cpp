#include "gani/matrix.hpp"

#include <algorithm>

#include "gani/error.hpp"

namespace gani {

void Matrix::append_row(std::span<const double> values) {
  if (values.size() != cols_) {
    throw InvalidArgument("append_row: expected " + std::to_string(cols_) +
                          " values, got " + std::to_string(values.size()));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix CsrMatrix::to_dense() const {
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t e = offsets[r]; e < offsets[r + 1]; ++e) {
      out(r, indices[e]) = values[e];
    }
  }
  return out;
}

Matrix multiply(const CsrMatrix& a, const Matrix& b) {
  if (a.cols != b.rows()) throw InvalidArgument("multiply: dimension mismatch");
  Matrix out(a.rows, b.cols());
  for (std::size_t r = 0; r < a.rows; ++r) {
    auto dst = out.row(r);
    for (std::size_t e = a.offsets[r]; e < a.offsets[r + 1]; ++e) {
      const double w = a.values[e];
      const auto src = b.row(a.indices[e]);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("multiply: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    const auto lhs = a.row(r);
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      const double w = lhs[k];
      if (w == 0.0) continue;
      const auto src = b.row(k);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

Matrix multiply_transposed(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("multiply_transposed: dimension mismatch");
  Matrix out(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto lhs = a.row(r);
    const auto rhs = b.row(r);
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      const double w = lhs[k];
      if (w == 0.0) continue;
      auto dst = out.row(k);
      for (std::size_t c = 0; c < rhs.size(); ++c) dst[c] += w * rhs[c];
    }
  }
  return out;
}

Matrix multiply_transposed(const CsrMatrix& a, const Matrix& b) {
  if (a.rows != b.rows()) throw InvalidArgument("multiply_transposed: dimension mismatch");
  Matrix out(a.cols, b.cols());
  for (std::size_t r = 0; r < a.rows; ++r) {
    const auto rhs = b.row(r);
    for (std::size_t e = a.offsets[r]; e < a.offsets[r + 1]; ++e) {
      const double w = a.values[e];
      auto dst = out.row(a.indices[e]);
      for (std::size_t c = 0; c < rhs.size(); ++c) dst[c] += w * rhs[c];
    }
  }
  return out;
}

CsrMatrix sparsify(const Matrix& dense) {
  CsrMatrix out;
  out.rows = dense.rows();
  out.cols = dense.cols();
  out.offsets.reserve(out.rows + 1);
  out.offsets.push_back(0);
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    const auto row = dense.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] != 0.0) {
        out.indices.push_back(static_cast<std::uint32_t>(c));
        out.values.push_back(row[c]);
      }
    }
    out.offsets.push_back(out.indices.size());
  }
  return out;
}

}  // namespace gani
