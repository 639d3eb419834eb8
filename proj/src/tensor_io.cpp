#include "rangenull/tensor_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

#include "byte_order.hpp"
#include "rangenull/errors.hpp"

namespace rangenull {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports failures through longjmp. The message is parked here and
// turned into an exception once control is back in C++ frames.
struct PngErrorSink {
  char message[256] = {0};
};

void png_error_to_sink(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
  if (sink != nullptr) {
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  }
  png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

struct DecodedPng {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::size_t row_bytes = 0;
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  bool unsupported = false;
};

// Nothing with a destructor may be created in this frame: longjmp would
// skip it. All storage lives in `out`, owned by the caller.
bool decode_png(std::FILE* fp, png_structp png, png_infop info, DecodedPng& out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_info(png, info);
  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  out.color_type = png_get_color_type(png, info);
  if ((out.color_type != PNG_COLOR_TYPE_GRAY && out.color_type != PNG_COLOR_TYPE_RGB) ||
      (out.bit_depth != 8 && out.bit_depth != 16)) {
    out.unsupported = true;
    return true;
  }
  // tRNS on a gray/RGB image is an alpha channel in disguise.
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    out.unsupported = true;
    return true;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  out.row_bytes = png_get_rowbytes(png, info);
  out.pixels.resize(out.row_bytes * out.height);
  out.rows.resize(out.height);
  for (png_uint_32 y = 0; y < out.height; ++y) out.rows[y] = out.pixels.data() + y * out.row_bytes;
  png_read_image(png, out.rows.data());
  png_read_end(png, nullptr);
  return true;
}

bool encode_png(std::FILE* fp, png_structp png, png_infop info, png_uint_32 width,
                png_uint_32 height, int color_type, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}


std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

ImageTensor load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());

  png_byte signature[8];
  if (std::fread(signature, 1, 8, fp.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw ContractError(path.string() + ": not a PNG file");
  }

  PngErrorSink sink;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_to_sink, png_warning_ignore);
  if (png == nullptr) throw IoError("libpng: cannot allocate read struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng: cannot allocate info struct");
  }
  png_set_sig_bytes(png, 8);

  DecodedPng decoded;
  const bool ok = decode_png(fp.get(), png, info, decoded);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw ContractError(path.string() + ": corrupt PNG: " + sink.message);
  if (decoded.unsupported) {
    throw ContractError(path.string() + ": unsupported PNG (bit depth " +
                        std::to_string(decoded.bit_depth) + ", color type " +
                        std::to_string(decoded.color_type) +
                        "); only 8/16-bit gray or RGB without alpha is accepted");
  }

  const std::size_t channels = decoded.color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t height = decoded.height;
  const std::size_t width = decoded.width;
  const bool wide = decoded.bit_depth == 16;
  const double full_scale = wide ? 65535.0 : 255.0;

  std::vector<double> data(channels * height * width);
  for (std::size_t y = 0; y < height; ++y) {
    const png_byte* row = decoded.rows[y];
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t k = x * channels + c;
        const unsigned value = wide ? (unsigned{row[2 * k]} << 8) | row[2 * k + 1] : row[k];
        data[(c * height + y) * width + x] = value / full_scale;
      }
    }
  }
  return ImageTensor({channels, height, width}, std::move(data));
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::round(std::clamp(v, 0.0, 1.0) * 255.0));
}

void save_png(const ImageTensor& t, const std::filesystem::path& path) {
  const std::size_t channels = t.channels();
  if (channels != 1 && channels != 3) {
    throw ContractError("PNG output needs 1 or 3 channels, got " + std::to_string(channels));
  }
  const std::size_t height = t.height();
  const std::size_t width = t.width();
  std::vector<png_byte> pixels(height * width * channels);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        pixels[(y * width + x) * channels + c] = to_byte(t.at(c, y, x));
      }
    }
  }
  std::vector<png_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y) rows[y] = pixels.data() + y * width * channels;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());

  PngErrorSink sink;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_to_sink, png_warning_ignore);
  if (png == nullptr) throw IoError("libpng: cannot allocate write struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng: cannot allocate info struct");
  }
  const int color_type = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  const bool ok = encode_png(fp.get(), png, info, static_cast<png_uint_32>(width),
                             static_cast<png_uint_32>(height), color_type, rows.data());
  png_destroy_write_struct(&png, &info);
  if (!ok) throw IoError(path.string() + ": PNG write failed: " + sink.message);
  if (std::fflush(fp.get()) != 0) throw IoError("cannot write " + path.string());
}

void write_raw(const ImageTensor& t, const std::filesystem::path& path) {
  std::vector<unsigned char> buf;
  buf.reserve(kRawHeaderBytes + t.size() * sizeof(double));
  buf.insert(buf.end(), {'P', 'D', 'T', '1'});
  detail::put_le(buf, static_cast<std::uint32_t>(t.channels()));
  detail::put_le(buf, static_cast<std::uint32_t>(t.height()));
  detail::put_le(buf, static_cast<std::uint32_t>(t.width()));
  for (double v : t.data()) detail::put_le(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

ImageTensor read_raw(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < kRawHeaderBytes || std::memcmp(bytes.data(), "PDT1", 4) != 0) {
    throw ContractError(path.string() + ": bad magic, expected PDT1");
  }
  const Shape shape{detail::get_le<std::uint32_t>(bytes.data() + 4),
                    detail::get_le<std::uint32_t>(bytes.data() + 8),
                    detail::get_le<std::uint32_t>(bytes.data() + 12)};
  const std::uint64_t expected =
      kRawHeaderBytes + std::uint64_t{shape.channels} * shape.height * shape.width * 8;
  if (bytes.size() != expected) {
    throw ContractError(path.string() + ": header " + shape.to_string() + " needs " +
                        std::to_string(expected) + " bytes, file has " +
                        std::to_string(bytes.size()));
  }
  std::vector<double> data(shape.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = detail::get_le<double>(bytes.data() + kRawHeaderBytes + 8 * i);
  }
  return ImageTensor(shape, std::move(data));
}

ImageTensor load_any(const std::filesystem::path& path) {
  unsigned char magic[4] = {0};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.read(reinterpret_cast<char*>(magic), 4);
  }
  if (std::memcmp(magic, "PDT1", 4) == 0) return read_raw(path);
  if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G') {
    return load_png(path);
  }
  throw ContractError(path.string() + ": neither a PDT1 tensor nor a PNG image");
}

bool is_png_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png";
}

ImageTensor quantize(const ImageTensor& t) {
  ImageTensor out(t.shape());
  auto o = out.data();
  auto in = t.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = to_byte(in[i]) / 255.0;
  return out;
}

}  // namespace rangenull
