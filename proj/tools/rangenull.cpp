// rangenull: range/null-space decomposition tools for image restoration.
//
// Exit codes: 0 success, 2 usage error, 3 input contract violation.
// Machine output (JSON) goes to stdout, diagnostics to stderr.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rangenull/commands.hpp"
#include "rangenull/errors.hpp"

namespace {

using namespace rangenull;
using namespace rangenull::cli;

constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;


}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range/null-space decomposition for linear image degradations"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::uint64_t seed = 0;
  bool seed_given = false;
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t v) {
          seed = v;
          seed_given = true;
        },
        "RNG seed (default: $RANGENULL_SEED or 0)");
  };

  // degrade
  DegradeOptions degrade;
  bool no_antialias = false;
  auto* cmd_degrade_app = app.add_subcommand("degrade", "Downsample an image (PNG or PDT1)");
  cmd_degrade_app->add_option("--input", degrade.input, "Input image")->required();
  cmd_degrade_app->add_option("--output", degrade.output, "Output (.png or PDT1)")->required();
  cmd_degrade_app->add_option("--scale", degrade.scale, "Integer downscale factor")->required();
  std::string filter_name = "bicubic";
  cmd_degrade_app->add_option("--filter", filter_name, "box | bilinear | bicubic")
      ->check(CLI::IsMember({"box", "bilinear", "bicubic"}));
  cmd_degrade_app->add_flag("--no-antialias", no_antialias, "Do not stretch the kernel (alias)");

  // pd
  PdOptions pd;
  std::string png_out;
  std::string raw_in;
  auto* cmd_pd_app = app.add_subcommand("pd", "Pooling-based decomposition of a raw prediction");
  cmd_pd_app->add_option("--lr", pd.lr, "Low-resolution input")->required();
  cmd_pd_app->add_option("--output", pd.output, "Exact result (PDT1)")->required();
  cmd_pd_app->add_option("--png", png_out, "Also write a quantized PNG");
  cmd_pd_app->add_option("--scale", pd.scale, "Integer scale factor")->required();
  std::string predictor_name = "nearest";
  cmd_pd_app->add_option("--predictor", predictor_name, "nearest | bilinear | bicubic | external")
      ->check(CLI::IsMember({"nearest", "bilinear", "bicubic", "external"}));
  cmd_pd_app->add_option("--raw", raw_in, "Raw prediction file (implies --predictor external)");

  // verify
  VerifyOptions verify;
  auto* cmd_verify_app = app.add_subcommand("verify", "Consistency of SR against LR");
  cmd_verify_app->add_option("--lr", verify.lr, "Low-resolution input")->required();
  cmd_verify_app->add_option("--sr", verify.sr, "Super-resolved result")->required();
  cmd_verify_app->add_option("--scale", verify.scale, "Integer scale factor")->required();

  // errmap
  ErrmapOptions errmap;
  auto* cmd_errmap_app = app.add_subcommand("errmap", "Amplified error map as a color PNG");
  cmd_errmap_app->add_option("--gt", errmap.gt, "Reference image")->required();
  cmd_errmap_app->add_option("--sr", errmap.sr, "Compared image")->required();
  cmd_errmap_app->add_option("--output", errmap.output, "Output PNG")->required();
  cmd_errmap_app->add_option("--gain", errmap.gain, "Error amplification")
      ->check(CLI::PositiveNumber);

  // bench
  BenchOptions bench;
  auto* cmd_bench_app = app.add_subcommand("bench", "Time a pooling operation");
  cmd_bench_app->add_option("--op", bench.op_name, "pd | pool_down | pool_up | extract_highfreq");
  cmd_bench_app->add_option("--size", bench.size, "Image height and width");
  cmd_bench_app->add_option("--channels", bench.channels, "Channel count");
  cmd_bench_app->add_option("--scale", bench.scale, "Integer scale factor");
  cmd_bench_app->add_option("--iterations", bench.iterations, "Timed runs");
  add_seed(cmd_bench_app);

  // table1
  Table1Options table1;
  bool single = false;
  bool no_timing = false;
  auto* cmd_table1_app = app.add_subcommand("table1", "Consistency protocol on random images");
  cmd_table1_app->add_option("--count", table1.count, "Number of images");
  cmd_table1_app->add_option("--size", table1.size, "Image height and width");
  cmd_table1_app->add_option("--scale", table1.scale, "Pooling factor");
  cmd_table1_app->add_option("--threads", table1.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_table1_app->add_flag("--single", single, "Run PD in single precision");
  cmd_table1_app->add_flag("--no-timing", no_timing, "Omit mean_ms from the output");
  add_seed(cmd_table1_app);

  // colorize
  ColorizeOptions colorize;
  std::string colorize_raw;
  std::string colorize_mode = "to-gray";
  auto* cmd_colorize_app = app.add_subcommand("colorize", "Colorization operator and its PD");
  cmd_colorize_app->add_option("--mode", colorize_mode, "to-gray | to-color | pd")
      ->check(CLI::IsMember({"to-gray", "to-color", "pd"}));
  cmd_colorize_app->add_option("--input", colorize.input, "Input image")->required();
  cmd_colorize_app->add_option("--output", colorize.output, "Output (.png or PDT1)")->required();
  cmd_colorize_app->add_option("--raw", colorize_raw, "Color raw prediction (pd mode)");
  cmd_colorize_app->add_flag("--scaled-adjoint", colorize.scaled_adjoint,
                             "Use the 1/3-scaled back-projection instead of the pseudo-inverse");

  // cs
  auto* cmd_cs_app = app.add_subcommand("cs", "Block compressed sensing");
  cmd_cs_app->require_subcommand(1);
  CsBuildOptions cs_build_opts;
  auto* cs_build_app = cmd_cs_app->add_subcommand("build", "Generate a sampling operator (PDM1)");
  cs_build_app->add_option("--block", cs_build_opts.block, "Block size B")->check(CLI::PositiveNumber);
  cs_build_app->add_option("--ratio", cs_build_opts.ratio, "Sampling ratio in (0, 1]");
  cs_build_app->add_option("--output", cs_build_opts.output, "Operator file")->required();
  add_seed(cs_build_app);

  std::string cs_op, cs_in, cs_out, cs_raw;
  auto* cs_measure_app = cmd_cs_app->add_subcommand("measure", "Measure an image");
  auto* cs_pinv_app = cmd_cs_app->add_subcommand("pinv", "Back-project measurements");
  auto* cs_pd_app = cmd_cs_app->add_subcommand("pd", "Consistent solution from a raw prediction");
  for (auto* sub : {cs_measure_app, cs_pinv_app, cs_pd_app}) {
    sub->add_option("--op", cs_op, "Operator file (PDM1)")->required();
    sub->add_option("--input", cs_in, "Image (measure) or measurements (pinv, pd)")->required();
    sub->add_option("--output", cs_out, "Output file")->required();
  }
  cs_pd_app->add_option("--raw", cs_raw, "Raw prediction image")->required();

  // pinv
  PinvOptions pinv_opts;
  auto* cmd_pinv_app = app.add_subcommand("pinv", "SVD pseudo-inverse of a dense PDT1 matrix");
  cmd_pinv_app->add_option("--input", pinv_opts.input, "d x D matrix (1-channel PDT1)")->required();
  cmd_pinv_app->add_option("--output", pinv_opts.output, "D x d pseudo-inverse")->required();
  cmd_pinv_app->add_option("--tol", pinv_opts.tol, "Relative singular value cutoff");
  cmd_pinv_app->add_option("--trials", pinv_opts.trials, "Residual probe count");
  add_seed(cmd_pinv_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (!seed_given) seed = default_seed();

    if (*cmd_degrade_app) {
      degrade.filter = parse_filter(filter_name);
      degrade.antialias = !no_antialias;
      cmd_degrade(degrade);
    } else if (*cmd_pd_app) {
      pd.predictor = parse_predictor(predictor_name);
      if (!png_out.empty()) pd.png = png_out;
      if (!raw_in.empty()) {
        pd.raw = raw_in;
        pd.predictor = Predictor::external;
      }
      std::cout << cmd_pd(pd) << "\n";
    } else if (*cmd_verify_app) {
      std::cout << cmd_verify(verify).to_json() << "\n";
    } else if (*cmd_errmap_app) {
      cmd_errmap(errmap);
    } else if (*cmd_bench_app) {
      bench.seed = seed;
      std::cout << cmd_bench(bench).to_json() << "\n";
    } else if (*cmd_table1_app) {
      table1.seed = seed;
      table1.precision = single ? Precision::f32 : Precision::f64;
      std::cout << cmd_table1(table1).to_json(!no_timing) << "\n";
    } else if (*cmd_colorize_app) {
      colorize.mode = colorize_mode == "to-gray"    ? ColorizeMode::to_gray
                      : colorize_mode == "to-color" ? ColorizeMode::to_color
                                                    : ColorizeMode::pd;
      if (!colorize_raw.empty()) colorize.raw = colorize_raw;
      if (auto report = cmd_colorize(colorize)) std::cout << report->to_json() << "\n";
    } else if (*cmd_cs_app) {
      if (*cs_build_app) {
        cs_build_opts.seed = seed;
        cmd_cs_build(cs_build_opts);
      } else if (*cs_measure_app) {
        cmd_cs_measure(cs_op, cs_in, cs_out);
      } else if (*cs_pinv_app) {
        cmd_cs_pinv(cs_op, cs_in, cs_out);
      } else if (*cs_pd_app) {
        std::cout << cmd_cs_pd(cs_op, cs_in, cs_raw, cs_out).to_json() << "\n";
      }
    } else if (*cmd_pinv_app) {
      pinv_opts.seed = seed;
      std::cout << to_json(cmd_pinv(pinv_opts)) << "\n";
    }
  } catch (const rangenull::Error& e) {
    std::cerr << "rangenull: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "rangenull: " << e.what() << "\n";
    return kExitContract;
  }
  return 0;
}
