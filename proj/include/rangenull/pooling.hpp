#pragma once

#include <cstddef>
#include <span>

#include "rangenull/image_tensor.hpp"
#include "rangenull/linear_operator.hpp"
#include "rangenull/metrics.hpp"

namespace rangenull {

// Average pooling over non-overlapping s x s blocks, per channel. Height
// and width must be divisible by s; anything else is a ContractError
// because padding would break P_down P_up = I.
ImageTensor pool_down(const ImageTensor& x, std::size_t s);

// Replicates every sample into an s x s block. pool_down(pool_up(y)) == y.
ImageTensor pool_up(const ImageTensor& y, std::size_t s);

// High-frequency residual x - P_up(P_down(x)): the null-space part of x
// with respect to average pooling.
ImageTensor extract_highfreq(const ImageTensor& x_raw, std::size_t s);

// Pooling-based decomposition: P_up(y) + (x_raw - P_up(P_down(x_raw))).
// The result pools back to y up to rounding, whatever x_raw contains.
ImageTensor pd_combine(const ImageTensor& y, const ImageTensor& x_raw, std::size_t s);

// compare(y, pool_down(x_hat, s)).
ConsistencyReport verify_consistency(const ImageTensor& y, const ImageTensor& x_hat,
                                     std::size_t s);

// P_down / P_up as a LinearOperator on a fixed (c, H, W) input.
class PoolingOp final : public LinearOperator {
 public:
  PoolingOp(Shape in, std::size_t scale);

  Shape in_shape() const override { return in_; }
  Shape out_shape() const override;
  std::string name() const override { return "pooling"; }
  ImageTensor forward(const ImageTensor& x) const override { return pool_down(x, scale_); }
  ImageTensor pinv(const ImageTensor& y) const override { return pool_up(y, scale_); }

  std::size_t scale() const { return scale_; }

 private:
  Shape in_;
  std::size_t scale_;
};

namespace kernels {

// Raw planar kernels behind the tensor API. They write into caller-owned
// buffers and do no shape checking. Buffers are (channels, h, w) for the
// high-resolution side and (channels, h/s, w/s) for the low-resolution side.
template <typename T>
void pool_down(std::span<const T> hr, std::span<T> lr, Shape hr_shape, std::size_t s);

template <typename T>
void pool_up(std::span<const T> lr, std::span<T> hr, Shape hr_shape, std::size_t s);

template <typename T>
void extract_highfreq(std::span<const T> raw, std::span<T> out, Shape hr_shape, std::size_t s);

template <typename T>
void pd_combine(std::span<const T> lr, std::span<const T> raw, std::span<T> out,
                Shape hr_shape, std::size_t s);

}  // namespace kernels

}  // namespace rangenull
