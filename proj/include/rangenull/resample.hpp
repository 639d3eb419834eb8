#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>

#include "rangenull/image_tensor.hpp"

namespace rangenull {

enum class Filter { box, bilinear, bicubic };
enum class Direction { down, up };

struct ResampleSpec {
  Filter filter = Filter::bicubic;
  bool antialias = true;
  std::size_t scale = 1;
  Direction direction = Direction::down;
};

Filter parse_filter(std::string_view name);
std::string_view to_string(Filter f);

// Kernel profiles. bicubic uses a = -0.5 (support 2 on each side),
// bilinear the triangle (support 1), box the unit-width pulse.
double cubic_kernel(double x, double a = -0.5);
double triangle_kernel(double x);

// Separable integer-factor resampling, horizontal pass then vertical.
//  * output pixel i sits at source coordinate (i + 0.5) * s - 0.5 when
//    shrinking and (i + 0.5) / s - 0.5 when enlarging;
//  * with antialias on a downscale the kernel is stretched by s;
//  * taps outside the image clamp to the edge;
//  * weights for each output pixel are normalized to sum 1.
// Box downscaling is area averaging (identical to pool_down) whether or
// not antialias is set; box upscaling is replication.
ImageTensor resample(const ImageTensor& x, const ResampleSpec& spec);

enum class Predictor { nearest, bilinear, bicubic, external };
Predictor parse_predictor(std::string_view name);

// Stand-in for a learned upsampler: produces an s-times larger raw
// prediction of y. `external` loads a PDT1 or PNG whose shape must be
// exactly (c, s*h, s*w).
ImageTensor predict_raw(const ImageTensor& y, Predictor method, std::size_t s,
                        const std::optional<std::filesystem::path>& external_path = {});

}  // namespace rangenull
