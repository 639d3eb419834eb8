#include "rangenull/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "rangenull/errors.hpp"

namespace rangenull {

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

std::string ConsistencyReport::to_json() const {
  nlohmann::ordered_json j;
  j["psnr"] = psnr;
  j["l1"] = l1;
  j["mse"] = mse;
  j["max_abs"] = max_abs;
  j["pixel_count"] = pixel_count;
  return j.dump();
}

ConsistencyReport compare(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a.shape(), b.shape(), "compare");
  auto pa = a.data();
  auto pb = b.data();
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = std::abs(pa[i] - pb[i]);
    sum_abs += d;
    sum_sq += d * d;
    max_abs = std::max(max_abs, d);
  }
  ConsistencyReport r;
  r.pixel_count = pa.size();
  const double n = static_cast<double>(pa.size());
  r.l1 = sum_abs / n;
  r.mse = sum_sq / n;
  r.max_abs = max_abs;
  r.psnr = psnr_from_mse(r.mse);
  return r;
}

std::array<double, 3> ramp_color(double magnitude) {
  const double m = std::clamp(magnitude, 0.0, 1.0);
  const double t = 3.0 * m;
  if (t <= 1.0) return {t, 0.0, 0.0};
  if (t <= 2.0) return {1.0, t - 1.0, 0.0};
  return {1.0, 1.0, t - 2.0};
}

ImageTensor error_magnitude(const ImageTensor& gt, const ImageTensor& sr, double gain) {
  require_same_shape(gt.shape(), sr.shape(), "error_map");
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw ContractError("error_map: gain must be positive");
  }
  const std::size_t channels = gt.channels();
  ImageTensor out({1, gt.height(), gt.width()});
  auto dst = out.plane(0);
  for (std::size_t c = 0; c < channels; ++c) {
    auto a = gt.plane(c);
    auto b = sr.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] += std::min(gain * std::abs(a[i] - b[i]), 1.0);
    }
  }
  for (double& v : dst) v /= static_cast<double>(channels);
  return out;
}

ImageTensor error_map(const ImageTensor& gt, const ImageTensor& sr, double gain) {
  const ImageTensor magnitude = error_magnitude(gt, sr, gain);
  ImageTensor out({3, gt.height(), gt.width()});
  auto m = magnitude.plane(0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto rgb = ramp_color(m[i]);
    for (std::size_t c = 0; c < 3; ++c) out.plane(c)[i] = rgb[c];
  }
  return out;
}

}  // namespace rangenull
