#include "rangenull/pooling.hpp"

#include <algorithm>
#include <bit>
#include <vector>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

#include "rangenull/errors.hpp"

namespace rangenull {

namespace {

void require_scale(std::size_t s) {
  if (s == 0) throw ContractError("scale must be >= 1");
}

void require_divisible(const Shape& shape, std::size_t s, const char* what) {
  require_scale(s);
  if (shape.height % s != 0 || shape.width % s != 0) {
    throw ContractError(std::string(what) + ": dimensions " + std::to_string(shape.height) + "x" +
                        std::to_string(shape.width) + " are not divisible by scale " +
                        std::to_string(s));
  }
}

Shape low_res(const Shape& hr, std::size_t s) { return {hr.channels, hr.height / s, hr.width / s}; }

// Patch means are taken relative to the patch's first sample,
// anchor + sum(x - anchor) / s^2, so a constant patch yields its value
// exactly and pool_down(pool_up(y)) == y bit for bit. Differences are
// accumulated row by row, i.e. in row-major order within each patch.
template <typename T>
void patch_means(const T* hr_plane, std::size_t width, std::size_t oy, std::size_t s,
                 std::size_t ox_begin, std::size_t ox_end, std::vector<T>& means) {
  const T* first_row = hr_plane + oy * s * width;
  const T area = static_cast<T>(s * s);
  means.resize(ox_end - ox_begin);
  std::size_t ox = ox_begin;
  // Four patches at a time: independent accumulators, same order per patch.
  for (; ox + 4 <= ox_end; ox += 4) {
    const T* p = first_row + ox * s;
    const T a0 = p[0], a1 = p[s], a2 = p[2 * s], a3 = p[3 * s];
    T c0{0}, c1{0}, c2{0}, c3{0};
    for (std::size_t dy = 0; dy < s; ++dy) {
      const T* row = p + dy * width;
      for (std::size_t dx = 0; dx < s; ++dx) {
        c0 += row[dx] - a0;
        c1 += row[s + dx] - a1;
        c2 += row[2 * s + dx] - a2;
        c3 += row[3 * s + dx] - a3;
      }
    }
    T* m = means.data() + (ox - ox_begin);
    m[0] = a0 + c0 / area;
    m[1] = a1 + c1 / area;
    m[2] = a2 + c2 / area;
    m[3] = a3 + c3 / area;
  }
  for (; ox < ox_end; ++ox) {
    const T* p = first_row + ox * s;
    const T anchor = p[0];
    T acc{0};
    for (std::size_t dy = 0; dy < s; ++dy) {
      for (std::size_t dx = 0; dx < s; ++dx) acc += p[dy * width + dx] - anchor;
    }
    means[ox - ox_begin] = anchor + acc / area;
  }
}

// Large outputs are written with non-temporal stores: they skip the
// read-for-ownership of the destination and leave the cache to the inputs.
constexpr std::size_t kStreamingBytes = std::size_t{1} << 20;

template <typename T>
inline void store(T* dst, T v, bool streaming) {
#if defined(__x86_64__)
  if (streaming) {
    if constexpr (sizeof(T) == 8) {
      _mm_stream_si64(reinterpret_cast<long long*>(dst), std::bit_cast<long long>(v));
    } else {
      _mm_stream_si32(reinterpret_cast<int*>(dst), std::bit_cast<int>(v));
    }
    return;
  }
#endif
  (void)streaming;
  *dst = v;
}

inline void store_fence(bool streaming) {
#if defined(__x86_64__)
  if (streaming) _mm_sfence();
#endif
  (void)streaming;
}

template <typename T>
void patch_means_row(const T* hr_plane, std::size_t width, std::size_t oy, std::size_t s,
                     std::vector<T>& means) {
  patch_means(hr_plane, width, oy, s, 0, width / s, means);
}

// Column tiling for the two-pass kernels: one tile of an s-row band is read
// for the means and read again for the output while still in L1.
template <typename T>
std::size_t tile_patches(std::size_t s) {
  constexpr std::size_t kTileBytes = 16 * 1024;
  return std::max<std::size_t>(1, kTileBytes / (sizeof(T) * s * s));
}

}  // namespace

namespace kernels {

template <typename T>
void pool_down(std::span<const T> hr, std::span<T> lr, Shape hr_shape, std::size_t s) {
  const std::size_t oh = hr_shape.height / s;
  const std::size_t ow = hr_shape.width / s;
  std::vector<T> means;
  for (std::size_t c = 0; c < hr_shape.channels; ++c) {
    const T* plane = hr.data() + c * hr_shape.plane_size();
    T* out = lr.data() + c * oh * ow;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      patch_means_row(plane, hr_shape.width, oy, s, means);
      std::copy(means.begin(), means.end(), out + oy * ow);
    }
  }
}

template <typename T>
void pool_up(std::span<const T> lr, std::span<T> hr, Shape hr_shape, std::size_t s) {
  const std::size_t width = hr_shape.width;
  const std::size_t oh = hr_shape.height / s;
  const std::size_t ow = width / s;
  const bool streaming = hr.size_bytes() >= kStreamingBytes;
  for (std::size_t c = 0; c < hr_shape.channels; ++c) {
    const T* src = lr.data() + c * oh * ow;
    T* dst = hr.data() + c * hr_shape.plane_size();
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t dy = 0; dy < s; ++dy) {
        T* row = dst + (oy * s + dy) * width;
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const T v = src[oy * ow + ox];
          for (std::size_t dx = 0; dx < s; ++dx) store(row + ox * s + dx, v, streaming);
        }
      }
    }
  }
  store_fence(streaming);
}

template <typename T>
void extract_highfreq(std::span<const T> raw, std::span<T> out, Shape hr_shape, std::size_t s) {
  const std::size_t width = hr_shape.width;
  const std::size_t ow = width / s;
  const std::size_t tile = tile_patches<T>(s);
  const bool streaming = out.size_bytes() >= kStreamingBytes;
  std::vector<T> means;
  for (std::size_t c = 0; c < hr_shape.channels; ++c) {
    const T* src = raw.data() + c * hr_shape.plane_size();
    T* dst = out.data() + c * hr_shape.plane_size();
    for (std::size_t oy = 0; oy < hr_shape.height / s; ++oy) {
      for (std::size_t ox0 = 0; ox0 < ow; ox0 += tile) {
        const std::size_t ox1 = std::min(ow, ox0 + tile);
        patch_means(src, width, oy, s, ox0, ox1, means);
        for (std::size_t dy = 0; dy < s; ++dy) {
          const std::size_t offset = (oy * s + dy) * width;
          for (std::size_t ox = ox0; ox < ox1; ++ox) {
            const T mean = means[ox - ox0];
            for (std::size_t x = ox * s; x < (ox + 1) * s; ++x) {
              store(dst + offset + x, src[offset + x] - mean, streaming);
            }
          }
        }
      }
    }
  }
  store_fence(streaming);
}

template <typename T>
void pd_combine(std::span<const T> lr, std::span<const T> raw, std::span<T> out, Shape hr_shape,
                std::size_t s) {
  const std::size_t width = hr_shape.width;
  const std::size_t oh = hr_shape.height / s;
  const std::size_t ow = width / s;
  const std::size_t tile = tile_patches<T>(s);
  const bool streaming = out.size_bytes() >= kStreamingBytes;
  std::vector<T> means;
  for (std::size_t c = 0; c < hr_shape.channels; ++c) {
    const T* raw_plane = raw.data() + c * hr_shape.plane_size();
    T* out_plane = out.data() + c * hr_shape.plane_size();
    const T* lr_plane = lr.data() + c * oh * ow;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const T* lr_row = lr_plane + oy * ow;
      for (std::size_t ox0 = 0; ox0 < ow; ox0 += tile) {
        const std::size_t ox1 = std::min(ow, ox0 + tile);
        patch_means(raw_plane, width, oy, s, ox0, ox1, means);
        for (std::size_t dy = 0; dy < s; ++dy) {
          const std::size_t offset = (oy * s + dy) * width;
          const T* src = raw_plane + offset;
          T* dst = out_plane + offset;
          for (std::size_t ox = ox0; ox < ox1; ++ox) {
            const T base = lr_row[ox];
            const T mean = means[ox - ox0];
            for (std::size_t dx = 0; dx < s; ++dx) {
              const std::size_t x = ox * s + dx;
              store(dst + x, base + (src[x] - mean), streaming);
            }
          }
        }
      }
    }
  }
  store_fence(streaming);
}

template void pool_down<double>(std::span<const double>, std::span<double>, Shape, std::size_t);
template void pool_down<float>(std::span<const float>, std::span<float>, Shape, std::size_t);
template void pool_up<double>(std::span<const double>, std::span<double>, Shape, std::size_t);
template void pool_up<float>(std::span<const float>, std::span<float>, Shape, std::size_t);
template void extract_highfreq<double>(std::span<const double>, std::span<double>, Shape,
                                       std::size_t);
template void extract_highfreq<float>(std::span<const float>, std::span<float>, Shape,
                                      std::size_t);
template void pd_combine<double>(std::span<const double>, std::span<const double>,
                                 std::span<double>, Shape, std::size_t);
template void pd_combine<float>(std::span<const float>, std::span<const float>, std::span<float>,
                                Shape, std::size_t);

}  // namespace kernels

ImageTensor pool_down(const ImageTensor& x, std::size_t s) {
  require_divisible(x.shape(), s, "pool_down");
  ImageTensor out(low_res(x.shape(), s));
  kernels::pool_down<double>(x.data(), out.data(), x.shape(), s);
  return out;
}

ImageTensor pool_up(const ImageTensor& y, std::size_t s) {
  require_scale(s);
  const Shape lr = y.shape();
  ImageTensor out({lr.channels, lr.height * s, lr.width * s});
  kernels::pool_up<double>(y.data(), out.data(), out.shape(), s);
  return out;
}

ImageTensor extract_highfreq(const ImageTensor& x_raw, std::size_t s) {
  require_divisible(x_raw.shape(), s, "extract_highfreq");
  ImageTensor out(x_raw.shape());
  kernels::extract_highfreq<double>(x_raw.data(), out.data(), x_raw.shape(), s);
  return out;
}

ImageTensor pd_combine(const ImageTensor& y, const ImageTensor& x_raw, std::size_t s) {
  require_scale(s);
  const Shape expected{y.channels(), y.height() * s, y.width() * s};
  if (x_raw.shape() != expected) {
    throw ContractError("pd_combine: raw prediction has shape " + x_raw.shape().to_string() +
                        ", expected " + expected.to_string() + " for scale " + std::to_string(s));
  }
  ImageTensor out(expected);
  kernels::pd_combine<double>(y.data(), x_raw.data(), out.data(), expected, s);
  return out;
}

ConsistencyReport verify_consistency(const ImageTensor& y, const ImageTensor& x_hat,
                                     std::size_t s) {
  require_scale(s);
  const Shape expected{y.channels(), y.height() * s, y.width() * s};
  if (x_hat.shape() != expected) {
    throw ContractError("verify_consistency: reconstruction has shape " +
                        x_hat.shape().to_string() + ", expected " + expected.to_string());
  }
  return compare(y, pool_down(x_hat, s));
}

PoolingOp::PoolingOp(Shape in, std::size_t scale) : in_(in), scale_(scale) {
  require_divisible(in, scale, "PoolingOp");
}

Shape PoolingOp::out_shape() const { return low_res(in_, scale_); }

}  // namespace rangenull
