#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rangenull/image_tensor.hpp"

namespace rangenull {

// Dense row-major matrix. Only meant for the validation path and small
// user operators; structured operators never materialize one.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transpose() const;
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& m, std::span<const double> v);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Matrices travel as PDT1 tensors with channels=1, height=rows, width=cols.
ImageTensor to_tensor(const Matrix& m);
Matrix to_matrix(const ImageTensor& t);

}  // namespace rangenull
