#include "rangenull/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rangenull/errors.hpp"
#include "rangenull/pooling.hpp"
#include "rangenull/tensor_io.hpp"

namespace rangenull {

Filter parse_filter(std::string_view name) {
  if (name == "box") return Filter::box;
  if (name == "bilinear") return Filter::bilinear;
  if (name == "bicubic") return Filter::bicubic;
  throw ContractError("unknown filter '" + std::string(name) + "' (box, bilinear, bicubic)");
}

std::string_view to_string(Filter f) {
  switch (f) {
    case Filter::box:
      return "box";
    case Filter::bilinear:
      return "bilinear";
    case Filter::bicubic:
      return "bicubic";
  }
  return "?";
}

double cubic_kernel(double x, double a) {
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

double triangle_kernel(double x) {
  x = std::abs(x);
  return x < 1.0 ? 1.0 - x : 0.0;
}

namespace {

struct Tap {
  std::size_t index;
  double weight;
};
using TapTable = std::vector<std::vector<Tap>>;

double box_kernel(double x) { return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0; }

double kernel_value(Filter f, double x) {
  switch (f) {
    case Filter::box:
      return box_kernel(x);
    case Filter::bilinear:
      return triangle_kernel(x);
    case Filter::bicubic:
      return cubic_kernel(x);
  }
  return 0.0;
}

double kernel_radius(Filter f) {
  switch (f) {
    case Filter::box:
      return 0.5;
    case Filter::bilinear:
      return 1.0;
    case Filter::bicubic:
      return 2.0;
  }
  return 0.0;
}

TapTable build_taps(std::size_t in_len, std::size_t out_len, const ResampleSpec& spec) {
  const double s = static_cast<double>(spec.scale);
  const bool down = spec.direction == Direction::down;
  // Box shrinking is area averaging, so its pulse always spans the block.
  const bool stretch = down && (spec.antialias || spec.filter == Filter::box);
  const double support_scale = stretch ? s : 1.0;
  const double radius = kernel_radius(spec.filter) * support_scale;

  TapTable table(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double center = down ? (i + 0.5) * s - 0.5 : (i + 0.5) / s - 0.5;
    const auto first = static_cast<long long>(std::floor(center - radius));
    const auto last = static_cast<long long>(std::ceil(center + radius));
    std::vector<Tap>& taps = table[i];
    double total = 0.0;
    for (long long j = first; j <= last; ++j) {
      const double w = kernel_value(spec.filter, (static_cast<double>(j) - center) / support_scale);
      if (w == 0.0) continue;
      const auto clamped =
          static_cast<std::size_t>(std::clamp<long long>(j, 0, static_cast<long long>(in_len) - 1));
      if (!taps.empty() && taps.back().index == clamped) {
        taps.back().weight += w;
      } else {
        taps.push_back({clamped, w});
      }
      total += w;
    }
    if (taps.empty() || total == 0.0) {
      throw ContractError("resample: kernel has no support for output sample " +
                          std::to_string(i));
    }
    for (Tap& t : taps) t.weight /= total;
  }
  return table;
}

}  // namespace

ImageTensor resample(const ImageTensor& x, const ResampleSpec& spec) {
  if (spec.scale == 0) throw ContractError("resample: scale must be >= 1");
  const Shape in = x.shape();
  Shape out = in;
  if (spec.direction == Direction::down) {
    if (in.height % spec.scale != 0 || in.width % spec.scale != 0) {
      throw ContractError("resample: dimensions " + std::to_string(in.height) + "x" +
                          std::to_string(in.width) + " are not divisible by scale " +
                          std::to_string(spec.scale));
    }
    out.height = in.height / spec.scale;
    out.width = in.width / spec.scale;
  } else {
    out.height = in.height * spec.scale;
    out.width = in.width * spec.scale;
  }

  const TapTable horizontal = build_taps(in.width, out.width, spec);
  const TapTable vertical = build_taps(in.height, out.height, spec);

  ImageTensor tmp({in.channels, in.height, out.width});
  for (std::size_t c = 0; c < in.channels; ++c) {
    for (std::size_t y = 0; y < in.height; ++y) {
      const double* src = x.plane(c).data() + y * in.width;
      double* dst = tmp.plane(c).data() + y * out.width;
      for (std::size_t i = 0; i < out.width; ++i) {
        double acc = 0.0;
        for (const Tap& t : horizontal[i]) acc += t.weight * src[t.index];
        dst[i] = acc;
      }
    }
  }

  ImageTensor result(out);
  for (std::size_t c = 0; c < in.channels; ++c) {
    const double* src = tmp.plane(c).data();
    double* dst = result.plane(c).data();
    for (std::size_t i = 0; i < out.height; ++i) {
      double* row = dst + i * out.width;
      for (const Tap& t : vertical[i]) {
        const double* src_row = src + t.index * out.width;
        for (std::size_t xo = 0; xo < out.width; ++xo) row[xo] += t.weight * src_row[xo];
      }
    }
  }
  return result;
}

Predictor parse_predictor(std::string_view name) {
  if (name == "nearest") return Predictor::nearest;
  if (name == "bilinear") return Predictor::bilinear;
  if (name == "bicubic") return Predictor::bicubic;
  if (name == "external") return Predictor::external;
  throw ContractError("unknown predictor '" + std::string(name) +
                      "' (nearest, bilinear, bicubic, external)");
}

ImageTensor predict_raw(const ImageTensor& y, Predictor method, std::size_t s,
                        const std::optional<std::filesystem::path>& external_path) {
  if (s == 0) throw ContractError("predict_raw: scale must be >= 1");
  switch (method) {
    case Predictor::nearest:
      return pool_up(y, s);
    case Predictor::bilinear:
      return resample(y, {Filter::bilinear, false, s, Direction::up});
    case Predictor::bicubic:
      return resample(y, {Filter::bicubic, false, s, Direction::up});
    case Predictor::external: {
      if (!external_path) throw ContractError("external predictor needs a prediction file");
      ImageTensor raw = load_any(*external_path);
      const Shape expected{y.channels(), y.height() * s, y.width() * s};
      if (raw.shape() != expected) {
        throw ContractError("external prediction " + external_path->string() + " has shape " +
                            raw.shape().to_string() + ", expected " + expected.to_string());
      }
      return raw;
    }
  }
  throw ContractError("predict_raw: unknown method");
}

}  // namespace rangenull
