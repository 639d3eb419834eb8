#include "doctest.h"
#include "oracles.hpp"
#include "rangenull/errors.hpp"
#include "rangenull/pooling.hpp"
#include "rangenull/rng.hpp"
#include "rangenull/tensor_io.hpp"

using namespace rangenull;

namespace {

const ImageTensor kPatch({1, 2, 2}, std::vector<double>{1, 2, 3, 6});

Shape random_lr_shape(Rng& rng) {
  return {static_cast<std::size_t>(rng.integer(0, 1) ? 3 : 1),
          static_cast<std::size_t>(rng.integer(1, 6)), static_cast<std::size_t>(rng.integer(1, 6))};
}

}  // namespace

TEST_CASE("pool_down") {
  Rng rng(1);
  const ImageTensor x = random_tensor({3, 5, 7}, rng);
  CHECK(pool_down(x, 1) == x);
  CHECK(pool_down(kPatch, 2) == ImageTensor({1, 1, 1}, std::vector<double>{3.0}));

  const ImageTensor flat({1, 4, 6}, 0.7);
  const ImageTensor pooled = pool_down(flat, 2);
  CHECK(pooled.shape() == Shape{1, 2, 3});
  for (double v : pooled.data()) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));

  CHECK_THROWS_AS(pool_down(ImageTensor({1, 5, 4}), 2), ContractError);
  CHECK_THROWS_AS(pool_down(ImageTensor({1, 4, 4}), 0), ContractError);
}

TEST_CASE("pool_up") {
  Rng rng(2);
  const ImageTensor y = random_tensor({1, 3, 2}, rng);
  CHECK(pool_up(y, 1) == y);
  CHECK(pool_up(ImageTensor({1, 1, 1}, 4.0), 2) == ImageTensor({1, 2, 2}, 4.0));

  const ImageTensor ab({1, 1, 2}, std::vector<double>{0.25, 0.5});
  const ImageTensor up = pool_up(ab, 3);
  CHECK(up.shape() == Shape{1, 3, 6});
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 6; ++c) CHECK(up.at(0, r, c) == (c < 3 ? 0.25 : 0.5));
  }
}

TEST_CASE("pool_down(pool_up(y)) is exactly y") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const ImageTensor y = random_tensor(random_lr_shape(rng), rng, -3, 3);
    const std::size_t s = rng.integer(1, 8);
    CHECK(pool_down(pool_up(y, s), s) == y);
  }
}

TEST_CASE("extract_highfreq") {
  CHECK(max_abs(extract_highfreq(ImageTensor({3, 4, 4}, 0.3), 2)) == 0.0);
  CHECK(extract_highfreq(kPatch, 2) == ImageTensor({1, 2, 2}, std::vector<double>{-2, -1, 0, 3}));

  Rng rng(4);
  const ImageTensor x = random_tensor({3, 12, 12}, rng, -1, 2);
  const ImageTensor delta = extract_highfreq(x, 3);
  CHECK(max_abs(pool_down(delta, 3)) <= 1e-12);
  CHECK(max_abs_diff(extract_highfreq(delta, 3), delta) <= 1e-12);
  CHECK_THROWS_AS(extract_highfreq(ImageTensor({1, 3, 4}), 2), ContractError);
}

TEST_CASE("pd_combine worked examples") {
  const ImageTensor y({1, 1, 1}, 4.0);
  const ImageTensor x_hat = pd_combine(y, kPatch, 2);
  CHECK(x_hat == ImageTensor({1, 2, 2}, std::vector<double>{2, 3, 4, 7}));
  CHECK(pool_down(x_hat, 2).data()[0] == 4.0);

  // Pair (0, 1) against LR value 0 as a 2x2 patch of two columns.
  const ImageTensor pair({1, 2, 2}, std::vector<double>{0, 1, 0, 1});
  const ImageTensor split = pd_combine(ImageTensor({1, 1, 1}, 0.0), pair, 2);
  CHECK(split == ImageTensor({1, 2, 2}, std::vector<double>{-0.5, 0.5, -0.5, 0.5}));

  Rng rng(5);
  const ImageTensor raw = random_tensor({3, 8, 8}, rng);
  const ImageTensor lr = pool_down(raw, 4);
  CHECK(max_abs_diff(pd_combine(lr, raw, 4), raw) <= 1e-12);

  CHECK_THROWS_AS(pd_combine(ImageTensor({1, 2, 2}), ImageTensor({1, 4, 6}), 2), ContractError);
  CHECK_THROWS_AS(pd_combine(ImageTensor({3, 2, 2}), ImageTensor({1, 4, 4}), 2), ContractError);
}

TEST_CASE("consistency theorem on wild predictions") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Shape lr = random_lr_shape(rng);
    const std::size_t s = rng.integer(1, 8);
    const ImageTensor y = random_tensor(lr, rng);
    const Shape hr{lr.channels, lr.height * s, lr.width * s};
    const double spread = trial % 3 == 0 ? 100.0 : 1.0;
    const ImageTensor raw = random_tensor(hr, rng, -spread, spread);
    const ImageTensor x_hat = pd_combine(y, raw, s);
    CHECK(max_abs_diff(pool_down(x_hat, s), y) <= 1e-12 * spread);
    CHECK(x_hat == add(pool_up(y, s), extract_highfreq(raw, s)));
    CHECK(max_abs_diff(add(pool_up(pool_down(raw, s), s), extract_highfreq(raw, s)), raw) <=
          1e-12 * spread);
  }
}

TEST_CASE("pooling against the explicit matrices") {
  const Matrix a = oracle::pooling_matrix(4, 4, 2);
  const Matrix p = oracle::replication_matrix(4, 4, 2);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 16);
  CHECK(max_abs_diff(a * p, Matrix::identity(4)) == 0.0);
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ImageTensor x = random_tensor({1, 4, 4}, rng);
    const ImageTensor y = random_tensor({1, 2, 2}, rng);
    CHECK(max_abs_diff(pool_down(x, 2), oracle::apply(a, x, {1, 2, 2})) <= 1e-13);
    CHECK(max_abs_diff(pool_up(y, 2), oracle::apply(p, y, {1, 4, 4})) <= 1e-13);
  }
}

TEST_CASE("verify_consistency") {
  Rng rng(8);
  const ImageTensor y = random_tensor({3, 4, 4}, rng);
  const ImageTensor raw = random_tensor({3, 32, 32}, rng, -5, 5);
  const ConsistencyReport r = verify_consistency(y, pd_combine(y, raw, 8), 8);
  CHECK(r.max_abs <= 1e-12);
  CHECK(r.psnr >= 240.0);

  const ConsistencyReport exact = verify_consistency(y, pool_up(y, 2), 2);
  CHECK(exact.mse == 0.0);
  CHECK(exact.psnr == kPsnrCap);

  const ImageTensor shifted({1, 3, 3}, 0.51);
  const ConsistencyReport off = verify_consistency(ImageTensor({1, 3, 3}, 0.5), shifted, 1);
  CHECK(off.mse == doctest::Approx(1e-4).epsilon(1e-9));
  CHECK(off.psnr == doctest::Approx(40.0).epsilon(1e-9));

  CHECK_THROWS_AS(verify_consistency(y, raw, 4), ContractError);
}

TEST_CASE("quantization breaks exact consistency and is only reported") {
  const ImageTensor y({1, 1, 1}, 0.0);
  const ImageTensor pair({1, 2, 2}, std::vector<double>{0, 1, 0, 1});
  const ImageTensor x_hat = pd_combine(y, pair, 2);
  CHECK(verify_consistency(y, x_hat, 2).max_abs == 0.0);
  const ConsistencyReport after = verify_consistency(y, quantize(x_hat), 2);
  CHECK(after.max_abs == doctest::Approx(64.0 / 255.0).epsilon(1e-15));
}

TEST_CASE("PoolingOp shape contract") {
  const PoolingOp op({3, 16, 8}, 4);
  CHECK(op.out_shape() == Shape{3, 4, 2});
  CHECK_THROWS_AS(PoolingOp({1, 6, 6}, 4), ContractError);

  Rng rng(9);
  const ImageTensor y = random_tensor(op.out_shape(), rng);
  const ImageTensor raw = random_tensor(op.in_shape(), rng, -2, 2);
  CHECK(generic_pd(op, y, raw) == pd_combine(y, raw, 4));
}

TEST_CASE("single-precision kernels") {
  Rng rng(10);
  const Shape hr{1, 16, 16};
  std::vector<float> raw(hr.size());
  for (float& v : raw) v = static_cast<float>(rng.uniform());
  std::vector<float> y(16);
  for (float& v : y) v = static_cast<float>(rng.uniform());
  std::vector<float> out(hr.size());
  kernels::pd_combine<float>(y, raw, out, hr, 4);
  std::vector<float> back(16);
  kernels::pool_down<float>(out, back, hr, 4);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(back[i] - y[i]) <= 1e-6f);
}
