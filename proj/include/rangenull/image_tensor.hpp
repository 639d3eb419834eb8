#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rangenull {

struct Shape {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t size() const { return channels * height * width; }
  std::size_t plane_size() const { return height * width; }
  bool operator==(const Shape&) const = default;

  std::string to_string() const;
};

// Planar (channel-major), row-major double-precision image. Samples are
// nominally in [0,1] but intermediates may leave that range; only
// finiteness is enforced.
class ImageTensor {
 public:
  ImageTensor() : ImageTensor(Shape{}) {}
  explicit ImageTensor(Shape shape, double fill = 0.0);
  // Throws ContractError on zero extents, size mismatch or non-finite data.
  ImageTensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> plane(std::size_t c) const;
  std::span<double> plane(std::size_t c);

  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }
  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }

  bool all_finite() const;
  std::vector<double> release() && { return std::move(data_); }

  bool operator==(const ImageTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Throws ContractError naming `what` when the shapes differ.
void require_same_shape(const Shape& a, const Shape& b, const char* what);

// Elementwise helpers used by the decomposition code.
ImageTensor add(const ImageTensor& a, const ImageTensor& b);
ImageTensor subtract(const ImageTensor& a, const ImageTensor& b);
ImageTensor scale(const ImageTensor& a, double factor);
double max_abs_diff(const ImageTensor& a, const ImageTensor& b);
double max_abs(const ImageTensor& a);

}  // namespace rangenull
