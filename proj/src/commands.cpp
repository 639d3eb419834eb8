#include "rangenull/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rangenull/errors.hpp"
#include "rangenull/pooling.hpp"
#include "rangenull/restore_ops.hpp"
#include "rangenull/rng.hpp"
#include "rangenull/svd.hpp"
#include "rangenull/tensor_io.hpp"

namespace rangenull::cli {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Independent stream per image so that results do not depend on how
// images are spread over threads.
std::uint64_t image_seed(std::uint64_t seed, int index) {
  return seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1));
}

double nearest_rank(const std::vector<double>& sorted, double fraction) {
  const auto n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::ceil(fraction * n));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv("RANGENULL_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw ContractError(std::string("RANGENULL_SEED is not an unsigned integer: ") + env);
  }
  return v;
}

void save_any(const ImageTensor& t, const path& p) {
  if (is_png_path(p)) {
    save_png(t, p);
  } else {
    write_raw(t, p);
  }
}

void cmd_degrade(const DegradeOptions& o) {
  const ImageTensor x = load_any(o.input);
  const ImageTensor y = resample(x, {o.filter, o.antialias, o.scale, Direction::down});
  save_any(y, o.output);
}

std::string cmd_pd(const PdOptions& o) {
  if (is_png_path(o.output)) {
    throw ContractError("--output holds the exact PDT1 result; use --png for an image copy");
  }
  const ImageTensor y = load_any(o.lr);
  const ImageTensor raw = predict_raw(y, o.predictor, o.scale, o.raw);
  const ImageTensor x_hat = pd_combine(y, raw, o.scale);
  write_raw(x_hat, o.output);

  const ConsistencyReport exact = verify_consistency(y, x_hat, o.scale);
  auto j = nlohmann::ordered_json::parse(exact.to_json());
  if (o.png) {
    save_png(x_hat, *o.png);
    const ConsistencyReport q = verify_consistency(y, quantize(x_hat), o.scale);
    j["quantized_psnr"] = q.psnr;
    j["quantized_l1"] = q.l1;
    j["quantized_mse"] = q.mse;
    j["quantized_max_abs"] = q.max_abs;
  }
  return j.dump();
}

ConsistencyReport cmd_verify(const VerifyOptions& o) {
  return verify_consistency(load_any(o.lr), load_any(o.sr), o.scale);
}

void cmd_errmap(const ErrmapOptions& o) {
  save_png(error_map(load_any(o.gt), load_any(o.sr), o.gain), o.output);
}

std::string BenchResult::to_json() const {
  nlohmann::ordered_json j;
  j["op_name"] = op_name;
  j["image_size"] = image_size;
  j["iterations"] = iterations;
  j["mean_ms"] = mean_ms;
  j["p50_ms"] = p50_ms;
  j["p95_ms"] = p95_ms;
  return j.dump();
}

BenchResult cmd_bench(const BenchOptions& o) {
  if (o.iterations < 1) throw ContractError("bench: iterations must be >= 1");
  if (o.scale == 0 || o.size % o.scale != 0) {
    throw ContractError("bench: size " + std::to_string(o.size) + " is not divisible by scale " +
                        std::to_string(o.scale));
  }
  Rng rng(o.seed);
  const Shape hr{o.channels, o.size, o.size};
  const Shape lr{o.channels, o.size / o.scale, o.size / o.scale};
  const ImageTensor x = random_tensor(hr, rng);
  const ImageTensor y = random_tensor(lr, rng);

  // Output buffers are allocated once so that only the operation is timed.
  std::vector<double> hr_out(hr.size());
  std::vector<double> lr_out(lr.size());
  std::function<void()> run;
  if (o.op_name == "pd") {
    run = [&] { kernels::pd_combine<double>(y.data(), x.data(), hr_out, hr, o.scale); };
  } else if (o.op_name == "pool_down") {
    run = [&] { kernels::pool_down<double>(x.data(), lr_out, hr, o.scale); };
  } else if (o.op_name == "pool_up") {
    run = [&] { kernels::pool_up<double>(y.data(), hr_out, hr, o.scale); };
  } else if (o.op_name == "extract_highfreq") {
    run = [&] { kernels::extract_highfreq<double>(x.data(), hr_out, hr, o.scale); };
  } else {
    throw ContractError("bench: unknown op '" + o.op_name +
                        "' (pd, pool_down, pool_up, extract_highfreq)");
  }

  run();  // warm-up, untimed
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(o.iterations));
  for (int i = 0; i < o.iterations; ++i) {
    const auto start = Clock::now();
    run();
    times.push_back(elapsed_ms(start));
  }
  const double sink = hr_out[0] + lr_out[0];
  if (!std::isfinite(sink)) throw Error("bench: non-finite result");

  BenchResult r;
  r.op_name = o.op_name;
  r.image_size = o.size;
  r.iterations = o.iterations;
  r.mean_ms = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
  std::sort(times.begin(), times.end());
  r.p50_ms = nearest_rank(times, 0.50);
  r.p95_ms = nearest_rank(times, 0.95);
  return r;
}

std::string Table1Summary::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["count"] = count;
  j["size"] = size;
  j["scale"] = scale;
  j["precision"] = precision == Precision::f64 ? "double" : "single";
  j["mean_psnr"] = mean_psnr;
  j["min_psnr"] = min_psnr;
  j["mean_max_abs"] = mean_max_abs;
  j["worst_max_abs"] = worst_max_abs;
  if (include_timing) j["mean_ms"] = mean_ms;
  return j.dump();
}

namespace {

struct ImageOutcome {
  ConsistencyReport report;
  double ms = 0.0;
};

// One image of the consistency protocol: random ground truth pooled to
// the low-resolution input, random noise as the raw prediction.
ImageOutcome run_table1_image(const Table1Options& o, int index) {
  Rng rng(image_seed(o.seed, index));
  const Shape hr{o.channels, o.size, o.size};
  const ImageTensor gt = random_tensor(hr, rng);
  const ImageTensor raw = random_tensor(hr, rng);
  const ImageTensor y = pool_down(gt, o.scale);

  ImageOutcome outcome;
  if (o.precision == Precision::f64) {
    const auto start = Clock::now();
    const ImageTensor x_hat = pd_combine(y, raw, o.scale);
    outcome.ms = elapsed_ms(start);
    outcome.report = verify_consistency(y, x_hat, o.scale);
    return outcome;
  }

  std::vector<float> y32(y.data().begin(), y.data().end());
  std::vector<float> raw32(raw.data().begin(), raw.data().end());
  std::vector<float> out32(raw32.size());
  const auto start = Clock::now();
  kernels::pd_combine<float>(y32, raw32, out32, hr, o.scale);
  outcome.ms = elapsed_ms(start);
  // Consistency is judged against the single-precision input PD actually saw.
  const ImageTensor y_seen(y.shape(), std::vector<double>(y32.begin(), y32.end()));
  const ImageTensor x_hat(hr, std::vector<double>(out32.begin(), out32.end()));
  outcome.report = verify_consistency(y_seen, x_hat, o.scale);
  return outcome;
}

}  // namespace

Table1Summary cmd_table1(const Table1Options& o) {
  if (o.count < 1) throw ContractError("table1: count must be >= 1");
  if (o.scale == 0 || o.size % o.scale != 0) {
    throw ContractError("table1: size " + std::to_string(o.size) + " is not divisible by scale " +
                        std::to_string(o.scale));
  }
  std::vector<ImageOutcome> outcomes(static_cast<std::size_t>(o.count));
  const int threads = std::clamp(o.threads, 1, o.count);
  if (threads == 1) {
    for (int i = 0; i < o.count; ++i) outcomes[i] = run_table1_image(o, i);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int i = t; i < o.count; i += threads) outcomes[i] = run_table1_image(o, i);
      });
    }
  }

  Table1Summary s;
  s.count = o.count;
  s.size = o.size;
  s.scale = o.scale;
  s.precision = o.precision;
  s.min_psnr = kPsnrCap;
  for (const ImageOutcome& r : outcomes) {
    s.mean_psnr += r.report.psnr;
    s.min_psnr = std::min(s.min_psnr, r.report.psnr);
    s.mean_max_abs += r.report.max_abs;
    s.worst_max_abs = std::max(s.worst_max_abs, r.report.max_abs);
    s.mean_ms += r.ms;
  }
  const double n = static_cast<double>(o.count);
  s.mean_psnr /= n;
  s.mean_max_abs /= n;
  s.mean_ms /= n;
  return s;
}

std::optional<ConsistencyReport> cmd_colorize(const ColorizeOptions& o) {
  const ImageTensor input = load_any(o.input);
  switch (o.mode) {
    case ColorizeMode::to_gray:
      save_any(color_to_gray(input), o.output);
      return std::nullopt;
    case ColorizeMode::to_color: {
      const ImageTensor color = o.scaled_adjoint ? gray_to_color_scaled(input) : gray_to_color(input);
      save_any(color, o.output);
      return compare(input, color_to_gray(color));
    }
    case ColorizeMode::pd: {
      if (!o.raw) throw ContractError("colorize pd needs --raw with a color prediction");
      const ImageTensor raw = load_any(*o.raw);
      const ColorMeanOp op(input.height(), input.width(), o.scaled_adjoint);
      const ImageTensor result = generic_pd(op, input, raw);
      save_any(result, o.output);
      return compare(input, op.forward(result));
    }
  }
  return std::nullopt;
}

void cmd_cs_build(const CsBuildOptions& o) {
  write_cs_op(cs_build(o.block, o.ratio, o.seed), o.output);
}

void cmd_cs_measure(const path& op, const path& input, const path& output) {
  write_raw(cs_measure(read_cs_op(op), load_any(input)), output);
}

void cmd_cs_pinv(const path& op, const path& measurements, const path& output) {
  save_any(cs_pinv(read_cs_op(op), read_raw(measurements)), output);
}

ConsistencyReport cmd_cs_pd(const path& op, const path& measurements, const path& raw,
                            const path& output) {
  const ImageTensor x_raw = load_any(raw);
  const BlockSenseOperator sampler(read_cs_op(op), x_raw.shape());
  const ImageTensor m = read_raw(measurements);
  const ImageTensor result = generic_pd(sampler, m, x_raw);
  save_any(result, output);
  return compare(m, sampler.forward(result));
}

MpResiduals cmd_pinv(const PinvOptions& o) {
  const Matrix a = to_matrix(read_raw(o.input));
  Matrix a_pinv = pinv_from_svd(svd(a), o.tol);
  write_raw(to_tensor(a_pinv), o.output);
  return mp_residuals(DenseOperator(a, std::move(a_pinv)), o.trials, o.seed);
}

std::string to_json(const MpResiduals& r) {
  nlohmann::ordered_json j;
  j["r1"] = r.r1;
  j["r2"] = r.r2;
  j["r3"] = r.r3;
  j["r4"] = r.r4;
  return j.dump();
}

}  // namespace rangenull::cli
