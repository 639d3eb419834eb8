#pragma once

#include <vector>

#include "rangenull/matrix.hpp"

namespace rangenull {

// m = u * diag(sigma) * v^T with u (d x d) and v (D x D) orthogonal and
// sigma descending, length min(d, D).
struct SvdFactors {
  Matrix u;
  std::vector<double> sigma;
  Matrix v;
};

struct SvdOptions {
  double tolerance = 1e-14;  // relative off-diagonal threshold
  int max_sweeps = 60;
};

// One-sided (Hestenes) Jacobi SVD with a fixed cyclic pair order, so the
// result is deterministic for a given input. Throws ContractError on empty
// or non-finite input.
SvdFactors svd(const Matrix& m, const SvdOptions& options = {});

// v * sigma^+ * u^T. Singular values at or below tol * sigma_max are
// treated as zero.
Matrix pinv_from_svd(const SvdFactors& f, double tol = 1e-12);

inline Matrix pinv(const Matrix& m, double tol = 1e-12) { return pinv_from_svd(svd(m), tol); }

}  // namespace rangenull
