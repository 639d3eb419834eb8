#pragma once

#include <cstdint>
#include <filesystem>

#include "rangenull/image_tensor.hpp"

namespace rangenull {

// 8- or 16-bit grayscale/RGB PNG, normalized to [0,1]. Alpha, palette and
// sub-byte depths are rejected with ContractError.
ImageTensor load_png(const std::filesystem::path& path);

// Writes an 8-bit PNG (1 or 3 channels) of round(clamp(v,0,1)*255).
// Output bytes are a pure function of the tensor.
void save_png(const ImageTensor& t, const std::filesystem::path& path);

// "PDT1" raw container:
//   bytes 0-3   ASCII "PDT1"
//   bytes 4-15  u32 LE channels, height, width
//   then channels*height*width f64 LE samples, planar row-major.
inline constexpr std::size_t kRawHeaderBytes = 16;
void write_raw(const ImageTensor& t, const std::filesystem::path& path);
ImageTensor read_raw(const std::filesystem::path& path);

// Dispatches on the file's leading magic bytes (PDT1 or PNG signature).
ImageTensor load_any(const std::filesystem::path& path);
bool is_png_path(const std::filesystem::path& path);

// round(clamp(v,0,1)*255)/255 with round-half-away-from-zero: what a
// tensor becomes after a trip through an 8-bit image file.
ImageTensor quantize(const ImageTensor& t);
std::uint8_t to_byte(double v);

}  // namespace rangenull
