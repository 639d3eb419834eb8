#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "rangenull/image_tensor.hpp"
#include "rangenull/matrix.hpp"

namespace rangenull {

// A linear degradation A : R^D -> R^d together with a pseudo-inverse
// A^+ satisfying at least A A^+ A = A. Both maps act on tensors so that
// structured operators never have to build their matrix.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Shape in_shape() const = 0;
  virtual Shape out_shape() const = 0;
  virtual std::string name() const = 0;

  // Implementations may assume the argument already has the right shape;
  // the checked entry points are apply_forward / apply_pinv.
  virtual ImageTensor forward(const ImageTensor& x) const = 0;
  virtual ImageTensor pinv(const ImageTensor& y) const = 0;

  ImageTensor apply_forward(const ImageTensor& x) const;
  ImageTensor apply_pinv(const ImageTensor& y) const;
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Shape shape) : shape_(shape) {}
  Shape in_shape() const override { return shape_; }
  Shape out_shape() const override { return shape_; }
  std::string name() const override { return "identity"; }
  ImageTensor forward(const ImageTensor& x) const override { return x; }
  ImageTensor pinv(const ImageTensor& y) const override { return y; }

 private:
  Shape shape_;
};

// Arbitrary d x D matrix. The pseudo-inverse comes from the Jacobi SVD
// unless one is supplied. Inputs are flattened in planar row-major order.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix a, double tol = 1e-12);
  DenseOperator(Matrix a, Matrix a_pinv);
  DenseOperator(Matrix a, Matrix a_pinv, Shape in, Shape out);

  Shape in_shape() const override { return in_; }
  Shape out_shape() const override { return out_; }
  std::string name() const override { return "dense"; }
  ImageTensor forward(const ImageTensor& x) const override;
  ImageTensor pinv(const ImageTensor& y) const override;

  const Matrix& matrix() const { return a_; }
  const Matrix& pinv_matrix() const { return a_pinv_; }

 private:
  Matrix a_;
  Matrix a_pinv_;
  Shape in_;
  Shape out_;
};

// A^+ A x: the component of x that the observation fully determines.
ImageTensor range_project(const LinearOperator& op, const ImageTensor& x);
// (I - A^+ A) x: the component the operator cannot see.
ImageTensor null_project(const LinearOperator& op, const ImageTensor& x);

// Consistent solution A^+ y + (I - A^+ A) x_raw.
ImageTensor generic_pd(const LinearOperator& op, const ImageTensor& y,
                       const ImageTensor& x_raw);

// Monte-Carlo Moore-Penrose diagnostics, max-abs over all trials:
//   r1  A A^+ A x - A x
//   r2  A^+ A A^+ y - A^+ y
//   r3  <u, A A^+ v> - <A A^+ u, v>   (symmetry of A A^+)
//   r4  <u, A^+ A v> - <A^+ A u, v>   (symmetry of A^+ A)
struct MpResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double r4 = 0.0;

  double max() const;
};

MpResiduals mp_residuals(const LinearOperator& op, int trials, std::uint64_t seed);

}  // namespace rangenull
