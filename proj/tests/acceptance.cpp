// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "oracles.hpp"
#include "rangenull/commands.hpp"
#include "rangenull/linear_operator.hpp"
#include "rangenull/pooling.hpp"
#include "rangenull/restore_ops.hpp"
#include "rangenull/rng.hpp"
#include "rangenull/svd.hpp"
#include "rangenull/tensor_io.hpp"

using namespace rangenull;

namespace {

int failures = 0;

void report(const char* id, const char* title, bool ok, const std::string& detail) {
  std::printf("%s %s %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

void ac1_consistency() {
  using clock = std::chrono::steady_clock;
  cli::Table1Options o;
  o.count = 100;
  o.size = 256;
  o.scale = 8;
  o.seed = 20230101;
  const auto t0 = clock::now();
  const auto dbl = cli::cmd_table1(o);
  const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
  o.precision = cli::Precision::f32;
  const auto sgl = cli::cmd_table1(o);

  const bool ok = dbl.mean_max_abs <= 1e-12 && dbl.mean_psnr >= 240.0 &&
                  sgl.mean_psnr >= 125.0 && seconds < 30.0;
  report("AC1", "consistency of PD on random data", ok,
         "double mean_max_abs=" + fmt("%.3e", dbl.mean_max_abs) +
             " mean_psnr=" + fmt("%.2f", dbl.mean_psnr) +
             " dB; single mean_psnr=" + fmt("%.2f", sgl.mean_psnr) +
             " dB; double runtime=" + fmt("%.2f", seconds) + " s");
}

void ac2_worked_example() {
  // Two-sample average with its analytic pseudo-inverse (all ones), and
  // again with the pseudo-inverse taken from the SVD.
  const Matrix a(1, 2, {0.5, 0.5});
  const DenseOperator avg(a, Matrix(2, 1, {1.0, 1.0}));
  const DenseOperator avg_svd(a);
  const ImageTensor y({1, 1, 1}, 0.0);
  const ImageTensor raw({1, 1, 2}, std::vector<double>{0.0, 1.0});
  const ImageTensor out = generic_pd(avg, y, raw);
  const ImageTensor out_svd = generic_pd(avg_svd, y, raw);
  const bool dense_ok = out.data()[0] == -0.5 && out.data()[1] == 0.5 &&
                        max_abs_diff(out_svd, out) <= 1e-15;

  // Same example through the pooling path: one 2x2 patch.
  const ImageTensor raw_patch({1, 2, 2}, std::vector<double>{0.0, 1.0, 0.0, 1.0});
  const ImageTensor pooled = pd_combine(y, raw_patch, 2);
  const bool pool_ok = pooled.data()[0] == -0.5 && pooled.data()[1] == 0.5 &&
                       pooled.data()[2] == -0.5 && pooled.data()[3] == 0.5;

  const ImageTensor quant = quantize(out);
  const double hi = std::round(0.5 * 255.0) / 255.0;
  const bool quant_ok = quant.data()[0] == 0.0 && quant.data()[1] == hi && hi == 128.0 / 255.0;

  const double expected_err = 0.5 * (0.0 + hi) - 0.0;
  const double err = max_abs_diff(avg.forward(quant), y);
  const double pool_err = max_abs_diff(pool_down(quantize(pooled), 2), y);
  const bool err_ok = std::abs(err - expected_err) <= 1e-15 &&
                      std::abs(pool_err - expected_err) <= 1e-15 &&
                      std::abs(expected_err - 64.0 / 255.0) <= 1e-15;

  report("AC2", "worked two-sample example", dense_ok && pool_ok && quant_ok && err_ok,
         "pd=(" + fmt("%g", out.data()[0]) + ", " + fmt("%g", out.data()[1]) + ") quantized=(" +
             fmt("%g", quant.data()[0] * 255.0) + "/255, " + fmt("%g", quant.data()[1] * 255.0) +
             "/255) consistency error=" + fmt("%.17g", err) + " (expected " +
             fmt("%.17g", expected_err) + "), svd path diff=" + fmt("%.1e", max_abs_diff(out_svd, out)));
}

struct Case {
  std::unique_ptr<LinearOperator> op;
  ImageTensor x;
};

Case random_case(int index, Rng& rng) {
  const std::size_t channels = rng.below(2) == 0 ? 1 : 3;
  switch (index % 3) {
    case 0: {
      const std::size_t s = static_cast<std::size_t>(rng.integer(1, 8));
      const Shape shape{channels, s * static_cast<std::size_t>(rng.integer(1, 6)),
                        s * static_cast<std::size_t>(rng.integer(1, 6))};
      return {std::make_unique<PoolingOp>(shape, s), random_tensor(shape, rng, -1.0, 1.0)};
    }
    case 1: {
      const std::size_t h = static_cast<std::size_t>(rng.integer(1, 24));
      const std::size_t w = static_cast<std::size_t>(rng.integer(1, 24));
      return {std::make_unique<ColorMeanOp>(h, w), random_tensor({3, h, w}, rng, -1.0, 1.0)};
    }
    default: {
      static const std::size_t blocks[] = {2, 4, 8};
      const std::size_t b = blocks[rng.below(3)];
      const double ratio = 0.05 + 0.95 * rng.uniform();
      const Shape shape{channels, b * static_cast<std::size_t>(rng.integer(1, 3)),
                        b * static_cast<std::size_t>(rng.integer(1, 3))};
      return {std::make_unique<BlockSenseOperator>(cs_build(b, ratio, rng.next()), shape),
              random_tensor(shape, rng, -1.0, 1.0)};
    }
  }
}

void ac3_ac4_decomposition() {
  Rng rng(777);
  double worst_identity = 0.0;
  double worst_null = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Case c = random_case(i, rng);
    const ImageTensor r = range_project(*c.op, c.x);
    const ImageTensor n = null_project(*c.op, c.x);
    worst_identity = std::max(worst_identity, max_abs_diff(add(r, n), c.x));
    worst_null = std::max(worst_null, max_abs(c.op->apply_forward(n)));
  }
  report("AC3", "range plus null part reproduces x", worst_identity <= 1e-12,
         "1000 cases, worst max_abs=" + fmt("%.3e", worst_identity));
  report("AC4", "null part invisible to the operator", worst_null <= 1e-10,
         "1000 cases, worst max_abs=" + fmt("%.3e", worst_null));
}

double mp_direct(const Matrix& a, const Matrix& ap) {
  const Matrix aap = a * ap;
  const Matrix apa = ap * a;
  return std::max({max_abs_diff(aap * a, a), max_abs_diff(apa * ap, ap),
                   max_abs_diff(aap.transpose(), aap), max_abs_diff(apa.transpose(), apa)});
}

void ac5_svd_pinv() {
  Rng rng(4242);
  double worst_mp = 0.0;
  double worst_closed = 0.0;
  int full_row_rank = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = static_cast<std::size_t>(rng.integer(1, 64));
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 96));
    Matrix a;
    const bool deficient = i % 4 == 3 && std::min(m, n) > 1;
    if (deficient) {
      const auto rank_cap = static_cast<std::int64_t>(std::min(m, n)) - 1;
      const std::size_t r = static_cast<std::size_t>(rng.integer(1, rank_cap));
      a = oracle::random_matrix(m, r, rng) * oracle::random_matrix(r, n, rng);
    } else {
      a = oracle::random_matrix(m, n, rng);
    }
    const Matrix ap = pinv(a);
    worst_mp = std::max(worst_mp, mp_direct(a, ap));
    if (!deficient && m <= n) {
      ++full_row_rank;
      worst_closed = std::max(worst_closed, max_abs_diff(ap, oracle::closed_form_pinv(a)));
    }
  }
  report("AC5", "SVD pseudo-inverse", worst_mp <= 1e-8 && worst_closed <= 1e-7,
         "200 matrices, worst MP residual=" + fmt("%.3e", worst_mp) + "; " +
             std::to_string(full_row_rank) + " full-row-rank, worst closed-form diff=" +
             fmt("%.3e", worst_closed));
}

void ac6_dense_pooling() {
  Rng rng(606);
  const Matrix down = oracle::pooling_matrix(4, 4, 2);
  const Matrix up = oracle::replication_matrix(4, 4, 2);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ImageTensor x = random_tensor({3, 4, 4}, rng, -1.0, 1.0);
    const ImageTensor y = random_tensor({3, 2, 2}, rng, -1.0, 1.0);
    worst = std::max(worst, max_abs_diff(pool_down(x, 2), oracle::apply_per_channel(down, x, {3, 2, 2})));
    worst = std::max(worst, max_abs_diff(pool_up(y, 2), oracle::apply_per_channel(up, y, {3, 4, 4})));
  }
  report("AC6", "pooling matches explicit matrices", worst <= 1e-13,
         "100 images at s=2, worst max_abs=" + fmt("%.3e", worst));
}

void ac7_block_sensing() {
  Rng rng(707);
  double worst_ortho = 0.0;
  double worst_consistency = 0.0;
  double worst_recovery = 0.0;
  for (std::size_t b : {4, 8}) {
    for (double ratio : {0.25, 0.5, 1.0}) {
      const BlockSenseOp op = cs_build(b, ratio, 1000 + b);
      const Matrix gram = op.rows * op.rows.transpose();
      const Matrix diff = gram - Matrix::identity(op.q);
      for (std::size_t r = 0; r < op.q; ++r) {
        double row_sum = 0.0;
        for (double v : diff.row(r)) row_sum += std::abs(v);
        worst_ortho = std::max(worst_ortho, row_sum);
      }
      const Shape shape{3, 4 * b, 2 * b};
      const BlockSenseOperator lin(op, shape);
      const ImageTensor x = random_tensor(shape, rng);
      const ImageTensor y = lin.forward(x);
      const ImageTensor out = generic_pd(lin, y, random_tensor(shape, rng));
      worst_consistency = std::max(worst_consistency, max_abs_diff(lin.forward(out), y));
      if (ratio == 1.0) worst_recovery = std::max(worst_recovery, max_abs_diff(lin.pinv(y), x));
    }
  }
  report("AC7", "block compressed-sensing operator",
         worst_ortho <= 1e-8 && worst_consistency <= 1e-10 && worst_recovery <= 1e-10,
         "orthonormality=" + fmt("%.3e", worst_ortho) + " consistency=" +
             fmt("%.3e", worst_consistency) + " full-ratio recovery=" + fmt("%.3e", worst_recovery));
}

void ac8_colorization() {
  Rng rng(808);
  double worst_round = 0.0;
  double worst_pd = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t h = static_cast<std::size_t>(rng.integer(1, 32));
    const std::size_t w = static_cast<std::size_t>(rng.integer(1, 32));
    const ImageTensor g = random_tensor({1, h, w}, rng);
    worst_round = std::max(worst_round, max_abs_diff(color_to_gray(gray_to_color(g)), g));
    const ColorMeanOp op(h, w);
    const ImageTensor out = generic_pd(op, g, random_tensor({3, h, w}, rng));
    worst_pd = std::max(worst_pd, max_abs_diff(color_to_gray(out), g));
  }
  const ColorMeanOp scaled(4, 4, true);
  const ImageTensor ones({3, 4, 4}, 1.0);
  const ImageTensor ax = scaled.forward(ones);
  const double residual = max_abs_diff(scaled.forward(scaled.pinv(ax)), ax);

  report("AC8", "colorization operator",
         worst_round <= 1e-15 && worst_pd <= 1e-12 && residual >= 0.5,
         "gray round trip=" + fmt("%.3e", worst_round) + " pd consistency=" +
             fmt("%.3e", worst_pd) + " scaled-adjoint AA+A-A residual=" + fmt("%.6f", residual));
}

void ac9_determinism() {
  const auto dir = oracle::scratch_dir("acceptance_determinism");
  Rng rng(909);
  write_raw(random_tensor({3, 32, 32}, rng), dir / "lr.pdt");
  write_raw(random_tensor({3, 64, 64}, rng), dir / "gt.pdt");
  write_raw(random_tensor({3, 64, 64}, rng), dir / "sr.pdt");

  bool ok = true;
  std::vector<std::string> checked;
  for (int run = 0; run < 2; ++run) {
    const std::string tag = std::to_string(run);
    ok &= clirun::run("pd --lr " + q(dir / "lr.pdt") + " --scale 8 --predictor bicubic --output " +
                      q(dir / ("pd" + tag + ".pdt")) + " --png " + q(dir / ("pd" + tag + ".png")))
              .exit_code == 0;
    ok &= clirun::run("errmap --gt " + q(dir / "gt.pdt") + " --sr " + q(dir / "sr.pdt") +
                      " --output " + q(dir / ("err" + tag + ".png")))
              .exit_code == 0;
    ok &= clirun::run("cs build --block 8 --ratio 0.25 --seed 5 --output " +
                      q(dir / ("cs" + tag + ".pdm")))
              .exit_code == 0;
  }
  for (const char* stem : {"pd", "err", "cs"}) {
    for (const char* ext : {".pdt", ".png", ".pdm"}) {
      const auto a = dir / (std::string(stem) + "0" + ext);
      if (!std::filesystem::exists(a)) continue;
      const std::string bytes_a = clirun::slurp(a);
      const std::string bytes_b = clirun::slurp(dir / (std::string(stem) + "1" + ext));
      ok &= !bytes_a.empty() && bytes_a == bytes_b;
      checked.push_back(std::string(stem) + ext);
    }
  }
  ok &= checked.size() == 4;
  std::string list;
  for (const auto& c : checked) list += (list.empty() ? "" : ", ") + c;
  report("AC9", "byte-identical outputs across runs", ok, "compared " + list);
}

void ac10_timing() {
  // Short rounds alternate between the two sizes so both see the same
  // machine load; the overall means are compared.
  constexpr int kRounds = 20;
  cli::BenchOptions o;
  o.op_name = "pd";
  o.iterations = 25;
  double small_ms = 0.0;
  double large_ms = 0.0;
  for (int round = 0; round < kRounds; ++round) {
    o.size = 512;
    small_ms += cli::cmd_bench(o).mean_ms / kRounds;
    o.size = 1024;
    large_ms += cli::cmd_bench(o).mean_ms / kRounds;
  }
  const double ratio = large_ms / small_ms;
  report("AC10", "PD cost linear in pixel count", ratio >= 3.0 && ratio <= 5.5,
         "mean over " + std::to_string(kRounds * o.iterations) + " runs each: 512^2=" +
             fmt("%.3f", small_ms) + " ms, 1024^2=" + fmt("%.3f", large_ms) +
             " ms, ratio=" + fmt("%.3f", ratio));
}

}  // namespace

int main() {
  try {
    ac1_consistency();
    ac2_worked_example();
    ac3_ac4_decomposition();
    ac5_svd_pinv();
    ac6_dense_pooling();
    ac7_block_sensing();
    ac8_colorization();
    ac9_determinism();
    ac10_timing();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
