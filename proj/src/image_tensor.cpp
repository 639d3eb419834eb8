#include "rangenull/image_tensor.hpp"

#include <cmath>
#include <sstream>

#include "rangenull/errors.hpp"

namespace rangenull {

std::string Shape::to_string() const {
  std::ostringstream os;
  os << "(" << channels << ", " << height << ", " << width << ")";
  return os.str();
}

namespace {

void check_extents(const Shape& shape) {
  if (shape.channels == 0 || shape.height == 0 || shape.width == 0) {
    throw ContractError("tensor extents must be positive, got " + shape.to_string());
  }
}

}  // namespace

ImageTensor::ImageTensor(Shape shape, double fill) : shape_(shape) {
  check_extents(shape_);
  if (!std::isfinite(fill)) throw ContractError("non-finite fill value");
  data_.assign(shape_.size(), fill);
}

ImageTensor::ImageTensor(Shape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  check_extents(shape_);
  if (data_.size() != shape_.size()) {
    throw ContractError("tensor data has " + std::to_string(data_.size()) +
                        " samples, shape " + shape_.to_string() + " needs " +
                        std::to_string(shape_.size()));
  }
  if (!all_finite()) throw ContractError("tensor contains NaN or infinity");
}

std::span<const double> ImageTensor::plane(std::size_t c) const {
  return std::span<const double>(data_).subspan(c * shape_.plane_size(), shape_.plane_size());
}

std::span<double> ImageTensor::plane(std::size_t c) {
  return std::span<double>(data_).subspan(c * shape_.plane_size(), shape_.plane_size());
}

bool ImageTensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ContractError(std::string(what) + ": shape mismatch " + a.to_string() + " vs " +
                        b.to_string());
  }
}

ImageTensor add(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  ImageTensor out(a.shape());
  auto o = out.data();
  auto pa = a.data();
  auto pb = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = pa[i] + pb[i];
  return out;
}

ImageTensor subtract(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a.shape(), b.shape(), "subtract");
  ImageTensor out(a.shape());
  auto o = out.data();
  auto pa = a.data();
  auto pb = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = pa[i] - pb[i];
  return out;
}

ImageTensor scale(const ImageTensor& a, double factor) {
  ImageTensor out(a.shape());
  auto o = out.data();
  auto pa = a.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = pa[i] * factor;
  return out;
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a.shape(), b.shape(), "max_abs_diff");
  double m = 0.0;
  auto pa = a.data();
  auto pb = b.data();
  for (std::size_t i = 0; i < pa.size(); ++i) m = std::max(m, std::abs(pa[i] - pb[i]));
  return m;
}

double max_abs(const ImageTensor& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace rangenull
