#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "rangenull/image_tensor.hpp"
#include "rangenull/linear_operator.hpp"
#include "rangenull/matrix.hpp"

namespace rangenull {

// Colorization: A maps RGB to the per-pixel channel mean, A^+ replicates
// the gray value into all three channels.
ImageTensor color_to_gray(const ImageTensor& x);
ImageTensor gray_to_color(const ImageTensor& g);
// The variant that scales each channel by 1/3 on the way back. It is the
// adjoint of color_to_gray, not its pseudo-inverse: A A^+ = I/3.
ImageTensor gray_to_color_scaled(const ImageTensor& g);

class ColorMeanOp final : public LinearOperator {
 public:
  ColorMeanOp(std::size_t height, std::size_t width, bool scaled_adjoint = false);

  Shape in_shape() const override { return {3, height_, width_}; }
  Shape out_shape() const override { return {1, height_, width_}; }
  std::string name() const override { return scaled_ ? "color-mean-scaled" : "color-mean"; }
  ImageTensor forward(const ImageTensor& x) const override { return color_to_gray(x); }
  ImageTensor pinv(const ImageTensor& g) const override;

 private:
  std::size_t height_;
  std::size_t width_;
  bool scaled_;
};

// Block compressed-sensing sampler. Each B x B block of each channel is
// flattened row-major into n = B*B values and multiplied by `rows`, a
// q x n matrix with orthonormal rows: the first q rows of U V^T where
// U S V^T is the SVD of an n x n standard-normal matrix drawn from
// Rng(seed) in row-major order.
struct BlockSenseOp {
  std::size_t block = 8;
  std::size_t q = 0;
  std::uint64_t seed = 0;
  double ratio = 1.0;
  Matrix rows;

  std::size_t n() const { return block * block; }
};

// q = ceil(ratio * B^2). Throws ContractError unless B >= 1 and
// 0 < ratio <= 1.
BlockSenseOp cs_build(std::size_t block, double ratio, std::uint64_t seed);
std::size_t cs_measurement_count(std::size_t block, double ratio);

// Measurements live in a tensor of shape (c*q, H/B, W/B); channel index
// is image_channel * q + k.
ImageTensor cs_measure(const BlockSenseOp& op, const ImageTensor& x);
// rows^T applied per block; `image_channels` is inferred as
// m.channels() / q.
ImageTensor cs_pinv(const BlockSenseOp& op, const ImageTensor& m);

class BlockSenseOperator final : public LinearOperator {
 public:
  BlockSenseOperator(BlockSenseOp op, Shape image_shape);

  Shape in_shape() const override { return in_; }
  Shape out_shape() const override;
  std::string name() const override { return "block-cs"; }
  ImageTensor forward(const ImageTensor& x) const override { return cs_measure(op_, x); }
  ImageTensor pinv(const ImageTensor& m) const override { return cs_pinv(op_, m); }

  const BlockSenseOp& sampler() const { return op_; }

 private:
  BlockSenseOp op_;
  Shape in_;
};

// "PDM1" container: ASCII magic, u32 LE B, u32 LE q, u64 LE seed, then
// q*B*B f64 LE row weights.
void write_cs_op(const BlockSenseOp& op, const std::filesystem::path& path);
BlockSenseOp read_cs_op(const std::filesystem::path& path);

}  // namespace rangenull
