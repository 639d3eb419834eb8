#pragma once

#include <cstdint>
#include <optional>

#include "rangenull/image_tensor.hpp"

namespace rangenull {

// xoshiro256** (Blackman & Vigna) seeded through splitmix64, with
// Box-Muller normals. Every step is integer arithmetic except the final
// Box-Muller transform, so streams are identical across platforms that
// share an IEEE-754 libm.
//
//   uniform():  (next() >> 11) * 2^-53            in [0, 1)
//   normal():   u1 = ((next() >> 11) + 1) * 2^-53  in (0, 1]
//               u2 = uniform()
//               r = sqrt(-2 ln u1); returns r cos(2 pi u2), then caches
//               r sin(2 pi u2) for the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t below(std::uint64_t n);  // [0, n)
  int integer(int lo, int hi);           // [lo, hi]

 private:
  std::uint64_t s_[4];
  std::optional<double> cached_normal_;
};

ImageTensor random_tensor(Shape shape, Rng& rng, double lo = 0.0, double hi = 1.0);

}  // namespace rangenull
