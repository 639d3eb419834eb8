#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rangenull/linear_operator.hpp"
#include "rangenull/metrics.hpp"
#include "rangenull/resample.hpp"

// Command implementations behind the `rangenull` executable. Each returns
// its machine-readable result; the executable prints it as JSON on stdout.
namespace rangenull::cli {

using std::filesystem::path;

inline constexpr std::uint64_t kDefaultSeed = 0;
// RANGENULL_SEED when set and parseable, otherwise kDefaultSeed.
std::uint64_t default_seed();

// Output extension picks the format: .png is quantized 8-bit, anything else PDT1.
void save_any(const ImageTensor& t, const path& p);

struct DegradeOptions {
  path input;
  path output;
  std::size_t scale = 8;
  Filter filter = Filter::bicubic;
  bool antialias = true;
};
void cmd_degrade(const DegradeOptions& o);

struct PdOptions {
  path lr;
  path output;                   // exact PDT1
  std::optional<path> png;       // optional quantized copy
  std::size_t scale = 8;
  Predictor predictor = Predictor::nearest;
  std::optional<path> raw;
};
// Report keys are those of ConsistencyReport; when a PNG is written the
// post-quantization figures are added under quantized_* keys.
std::string cmd_pd(const PdOptions& o);

struct VerifyOptions {
  path lr;
  path sr;
  std::size_t scale = 8;
};
ConsistencyReport cmd_verify(const VerifyOptions& o);

struct ErrmapOptions {
  path gt;
  path sr;
  path output;
  double gain = kDefaultErrorGain;
};
void cmd_errmap(const ErrmapOptions& o);

struct BenchOptions {
  std::string op_name = "pd";  // pd, pool_down, pool_up, extract_highfreq
  std::size_t size = 1024;
  std::size_t channels = 3;
  std::size_t scale = 8;
  int iterations = 100;
  std::uint64_t seed = kDefaultSeed;
};
struct BenchResult {
  std::string op_name;
  std::size_t image_size = 0;
  int iterations = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;

  std::string to_json() const;
};
BenchResult cmd_bench(const BenchOptions& o);

enum class Precision { f64, f32 };

struct Table1Options {
  int count = 100;
  std::size_t size = 256;
  std::size_t channels = 3;
  std::size_t scale = 8;
  std::uint64_t seed = kDefaultSeed;
  Precision precision = Precision::f64;
  int threads = 1;
};
struct Table1Summary {
  int count = 0;
  std::size_t size = 0;
  std::size_t scale = 0;
  Precision precision = Precision::f64;
  double mean_psnr = 0.0;
  double min_psnr = 0.0;
  double mean_max_abs = 0.0;
  double worst_max_abs = 0.0;
  double mean_ms = 0.0;  // timing only; excluded from determinism checks

  std::string to_json(bool include_timing = true) const;
};
Table1Summary cmd_table1(const Table1Options& o);

enum class ColorizeMode { to_gray, to_color, pd };
struct ColorizeOptions {
  ColorizeMode mode = ColorizeMode::to_gray;
  path input;                // color image (to_gray), gray image (to_color, pd)
  path output;
  std::optional<path> raw;   // color raw prediction for pd
  bool scaled_adjoint = false;
};
// Returns a ConsistencyReport of color_to_gray(output) against the gray
// input for to_color and pd; nothing for to_gray.
std::optional<ConsistencyReport> cmd_colorize(const ColorizeOptions& o);

struct CsBuildOptions {
  std::size_t block = 8;
  double ratio = 0.25;
  std::uint64_t seed = kDefaultSeed;
  path output;
};
void cmd_cs_build(const CsBuildOptions& o);
void cmd_cs_measure(const path& op, const path& input, const path& output);
void cmd_cs_pinv(const path& op, const path& measurements, const path& output);
// generic PD with the sampler; report compares the measurements against
// cs_measure(output).
ConsistencyReport cmd_cs_pd(const path& op, const path& measurements, const path& raw,
                            const path& output);

struct PinvOptions {
  path input;   // d x D matrix as a one-channel PDT1
  path output;  // D x d pseudo-inverse
  double tol = 1e-12;
  int trials = 8;
  std::uint64_t seed = kDefaultSeed;
};
MpResiduals cmd_pinv(const PinvOptions& o);
std::string to_json(const MpResiduals& r);

}  // namespace rangenull::cli
