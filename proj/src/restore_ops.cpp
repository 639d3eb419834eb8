#include "rangenull/restore_ops.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "byte_order.hpp"
#include "rangenull/errors.hpp"
#include "rangenull/rng.hpp"
#include "rangenull/svd.hpp"

namespace rangenull {

namespace {

void require_channels(const ImageTensor& t, std::size_t n, const char* what) {
  if (t.channels() != n) {
    throw ContractError(std::string(what) + ": expected " + std::to_string(n) +
                        " channel(s), got " + std::to_string(t.channels()));
  }
}

ImageTensor replicate_gray(const ImageTensor& g, double factor) {
  require_channels(g, 1, "gray_to_color");
  ImageTensor out({3, g.height(), g.width()});
  auto src = g.plane(0);
  for (std::size_t c = 0; c < 3; ++c) {
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * factor;
  }
  return out;
}

}  // namespace

ImageTensor color_to_gray(const ImageTensor& x) {
  require_channels(x, 3, "color_to_gray");
  ImageTensor out({1, x.height(), x.width()});
  auto r = x.plane(0);
  auto g = x.plane(1);
  auto b = x.plane(2);
  auto dst = out.plane(0);
  // Written relative to the first channel so that a replicated gray value
  // maps back to itself bit for bit.
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = r[i] + ((g[i] - r[i]) + (b[i] - r[i])) / 3.0;
  return out;
}

ImageTensor gray_to_color(const ImageTensor& g) { return replicate_gray(g, 1.0); }

ImageTensor gray_to_color_scaled(const ImageTensor& g) { return replicate_gray(g, 1.0 / 3.0); }

ColorMeanOp::ColorMeanOp(std::size_t height, std::size_t width, bool scaled_adjoint)
    : height_(height), width_(width), scaled_(scaled_adjoint) {
  if (height == 0 || width == 0) throw ContractError("ColorMeanOp: empty image");
}

ImageTensor ColorMeanOp::pinv(const ImageTensor& g) const {
  return scaled_ ? gray_to_color_scaled(g) : gray_to_color(g);
}

std::size_t cs_measurement_count(std::size_t block, double ratio) {
  if (block == 0) throw ContractError("cs: block size must be >= 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ContractError("cs: sampling ratio must lie in (0, 1], got " + std::to_string(ratio));
  }
  const std::size_t n = block * block;
  // The small slack keeps products like 0.3 * 100 = 30.000000000000004
  // from rounding up to an extra row.
  const auto q = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(q, 1, n);
}

BlockSenseOp cs_build(std::size_t block, double ratio, std::uint64_t seed) {
  const std::size_t q = cs_measurement_count(block, ratio);
  const std::size_t n = block * block;

  Rng rng(seed);
  Matrix gaussian(n, n);
  for (double& v : gaussian.data()) v = rng.normal();

  const SvdFactors f = svd(gaussian);
  // Orthogonal polar factor U V^T; its first q rows are orthonormal.
  Matrix rows(q, n);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += f.u(i, k) * f.v(j, k);
      rows(i, j) = acc;
    }
  }
  return BlockSenseOp{block, q, seed, ratio, std::move(rows)};
}

ImageTensor cs_measure(const BlockSenseOp& op, const ImageTensor& x) {
  const std::size_t b = op.block;
  if (x.height() % b != 0 || x.width() % b != 0) {
    throw ContractError("cs_measure: dimensions " + std::to_string(x.height()) + "x" +
                        std::to_string(x.width()) + " are not divisible by block " +
                        std::to_string(b));
  }
  const std::size_t bh = x.height() / b;
  const std::size_t bw = x.width() / b;
  ImageTensor out({x.channels() * op.q, bh, bw});
  std::vector<double> block(op.n());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t by = 0; by < bh; ++by) {
      for (std::size_t bx = 0; bx < bw; ++bx) {
        for (std::size_t dy = 0; dy < b; ++dy) {
          for (std::size_t dx = 0; dx < b; ++dx) block[dy * b + dx] = x.at(c, by * b + dy, bx * b + dx);
        }
        for (std::size_t k = 0; k < op.q; ++k) {
          const auto row = op.rows.row(k);
          double acc = 0.0;
          for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * block[i];
          out.at(c * op.q + k, by, bx) = acc;
        }
      }
    }
  }
  return out;
}

ImageTensor cs_pinv(const BlockSenseOp& op, const ImageTensor& m) {
  if (op.q == 0 || m.channels() % op.q != 0) {
    throw ContractError("cs_pinv: " + std::to_string(m.channels()) +
                        " measurement channels is not a multiple of q = " + std::to_string(op.q));
  }
  const std::size_t b = op.block;
  const std::size_t channels = m.channels() / op.q;
  ImageTensor out({channels, m.height() * b, m.width() * b});
  std::vector<double> block(op.n());
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t by = 0; by < m.height(); ++by) {
      for (std::size_t bx = 0; bx < m.width(); ++bx) {
        std::fill(block.begin(), block.end(), 0.0);
        for (std::size_t k = 0; k < op.q; ++k) {
          const double coeff = m.at(c * op.q + k, by, bx);
          const auto row = op.rows.row(k);
          for (std::size_t i = 0; i < row.size(); ++i) block[i] += coeff * row[i];
        }
        for (std::size_t dy = 0; dy < b; ++dy) {
          for (std::size_t dx = 0; dx < b; ++dx) out.at(c, by * b + dy, bx * b + dx) = block[dy * b + dx];
        }
      }
    }
  }
  return out;
}

BlockSenseOperator::BlockSenseOperator(BlockSenseOp op, Shape image_shape)
    : op_(std::move(op)), in_(image_shape) {
  if (in_.height % op_.block != 0 || in_.width % op_.block != 0) {
    throw ContractError("BlockSenseOperator: image " + in_.to_string() +
                        " is not divisible by block " + std::to_string(op_.block));
  }
}

Shape BlockSenseOperator::out_shape() const {
  return {in_.channels * op_.q, in_.height / op_.block, in_.width / op_.block};
}

namespace {

constexpr std::size_t kCsHeaderBytes = 20;

}  // namespace

void write_cs_op(const BlockSenseOp& op, const std::filesystem::path& path) {
  std::vector<unsigned char> buf;
  buf.reserve(kCsHeaderBytes + op.rows.data().size() * 8);
  buf.insert(buf.end(), {'P', 'D', 'M', '1'});
  detail::put_le(buf, static_cast<std::uint32_t>(op.block));
  detail::put_le(buf, static_cast<std::uint32_t>(op.q));
  detail::put_le(buf, static_cast<std::uint64_t>(op.seed));
  for (double w : op.rows.data()) detail::put_le(buf, w);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

BlockSenseOp read_cs_op(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  if (bytes.size() < kCsHeaderBytes || std::memcmp(bytes.data(), "PDM1", 4) != 0) {
    throw ContractError(path.string() + ": bad magic, expected PDM1");
  }
  const std::size_t block = detail::get_le<std::uint32_t>(bytes.data() + 4);
  const std::size_t q = detail::get_le<std::uint32_t>(bytes.data() + 8);
  const std::uint64_t seed = detail::get_le<std::uint64_t>(bytes.data() + 12);
  const std::size_t n = block * block;
  if (block == 0 || q == 0 || q > n) {
    throw ContractError(path.string() + ": invalid block " + std::to_string(block) + " / q " +
                        std::to_string(q));
  }
  if (bytes.size() != kCsHeaderBytes + q * n * 8) {
    throw ContractError(path.string() + ": payload size does not match B and q");
  }
  std::vector<double> weights(q * n);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = detail::get_le<double>(bytes.data() + kCsHeaderBytes + 8 * i);
    if (!std::isfinite(weights[i])) throw ContractError(path.string() + ": non-finite weight");
  }
  return BlockSenseOp{block, q, seed, static_cast<double>(q) / static_cast<double>(n),
                      Matrix(q, n, std::move(weights))};
}

}  // namespace rangenull
