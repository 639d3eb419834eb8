#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "rangenull/image_tensor.hpp"

namespace rangenull {

inline constexpr double kPsnrCap = 300.0;

// PSNR is against peak 1.0 and capped at kPsnrCap when mse == 0.
// pixel_count is the number of samples compared (channels included).
struct ConsistencyReport {
  double psnr = kPsnrCap;
  double l1 = 0.0;
  double mse = 0.0;
  double max_abs = 0.0;
  std::size_t pixel_count = 0;

  // Flat JSON object with keys psnr, l1, mse, max_abs, pixel_count.
  std::string to_json() const;
};

double psnr_from_mse(double mse);

// Sums run left to right over the planar buffer, so results are
// reproducible bit for bit.
ConsistencyReport compare(const ImageTensor& a, const ImageTensor& b);

// Error-map color ramp over magnitude m in [0,1], piecewise linear:
//   0   black  (0,0,0)
//   1/3 red    (1,0,0)
//   2/3 yellow (1,1,0)
//   1   white  (1,1,1)
std::array<double, 3> ramp_color(double magnitude);

inline constexpr double kDefaultErrorGain = 5.0;

// Per-pixel mean over channels of min(gain*|gt - sr|, 1). Single channel.
ImageTensor error_magnitude(const ImageTensor& gt, const ImageTensor& sr,
                            double gain = kDefaultErrorGain);
// error_magnitude pushed through ramp_color; always three channels.
ImageTensor error_map(const ImageTensor& gt, const ImageTensor& sr,
                      double gain = kDefaultErrorGain);

}  // namespace rangenull
