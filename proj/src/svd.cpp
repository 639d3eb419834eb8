#include "rangenull/svd.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "rangenull/errors.hpp"

namespace rangenull {

namespace {

using Column = std::vector<double>;

double dot(const Column& a, const Column& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void rotate(Column& p, Column& q, double c, double s) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double xp = p[i];
    const double xq = q[i];
    p[i] = c * xp - s * xq;
    q[i] = s * xp + c * xq;
  }
}

// Extends `basis` (orthonormal columns of length m) with unit vectors
// until it has m columns. Candidates are the standard basis vectors; each
// step takes the one with the largest component outside the current span,
// orthogonalized twice.
void complete_basis(std::vector<Column>& basis, std::size_t m) {
  while (basis.size() < m) {
    Column best;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
      Column e(m, 0.0);
      e[k] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const Column& b : basis) {
          const double proj = dot(b, e);
          for (std::size_t i = 0; i < m; ++i) e[i] -= proj * b[i];
        }
      }
      const double norm = std::sqrt(dot(e, e));
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(e);
      }
    }
    for (double& x : best) x /= best_norm;
    basis.push_back(std::move(best));
  }
}

Matrix from_columns(const std::vector<Column>& cols, std::size_t rows) {
  Matrix out(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows; ++i) out(i, j) = cols[j][i];
  }
  return out;
}

// Tall case, rows >= cols.
SvdFactors jacobi_tall(const Matrix& m, const SvdOptions& options) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();

  std::vector<Column> a(cols, Column(rows));
  std::vector<Column> v(cols, Column(cols, 0.0));
  double frob2 = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      a[j][i] = m(i, j);
      frob2 += m(i, j) * m(i, j);
    }
    v[j][j] = 1.0;
  }
  // Columns this small are zero to working precision; rotating them only
  // shuffles rounding noise.
  const double negligible2 = frob2 * DBL_EPSILON * DBL_EPSILON;

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        const double alpha = dot(a[p], a[p]);
        const double beta = dot(a[q], a[q]);
        if (alpha <= negligible2 || beta <= negligible2) continue;
        const double gamma = dot(a[p], a[q]);
        if (std::abs(gamma) <= options.tolerance * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(a[p], a[q], c, s);
        rotate(v[p], v[q], c, s);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(cols);
  for (std::size_t j = 0; j < cols; ++j) norms[j] = std::sqrt(dot(a[j], a[j]));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SvdFactors f;
  f.sigma.resize(cols);
  std::vector<Column> v_sorted(cols);
  std::vector<Column> u_cols;
  u_cols.reserve(rows);
  const double negligible = std::sqrt(negligible2);
  std::size_t rank = 0;
  for (std::size_t k = 0; k < cols; ++k) {
    const std::size_t j = order[k];
    f.sigma[k] = norms[j];
    v_sorted[k] = v[j];
    if (norms[j] > negligible) {
      Column u = a[j];
      for (double& x : u) x /= norms[j];
      u_cols.push_back(std::move(u));
      ++rank;
    }
  }
  // Sorted order puts every negligible column after the numerically
  // nonzero ones, so the completion vectors land in the right slots.
  complete_basis(u_cols, rows);
  f.u = from_columns(u_cols, rows);
  f.v = from_columns(v_sorted, cols);
  return f;
}

}  // namespace

SvdFactors svd(const Matrix& m, const SvdOptions& options) {
  if (m.rows() == 0 || m.cols() == 0) throw ContractError("svd: empty matrix");
  for (double x : m.data()) {
    if (!std::isfinite(x)) throw ContractError("svd: matrix has non-finite entries");
  }
  if (m.rows() >= m.cols()) return jacobi_tall(m, options);
  // Wide: factor the transpose and swap the roles of U and V.
  SvdFactors t = jacobi_tall(m.transpose(), options);
  return SvdFactors{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

Matrix pinv_from_svd(const SvdFactors& f, double tol) {
  const std::size_t d = f.u.rows();
  const std::size_t big_d = f.v.rows();
  Matrix out(big_d, d);
  const double sigma_max = f.sigma.empty() ? 0.0 : f.sigma.front();
  if (sigma_max <= 0.0) return out;
  const double cutoff = tol * sigma_max;
  for (std::size_t k = 0; k < f.sigma.size(); ++k) {
    if (f.sigma[k] <= cutoff) continue;
    const double inv = 1.0 / f.sigma[k];
    for (std::size_t i = 0; i < big_d; ++i) {
      const double vi = f.v(i, k) * inv;
      for (std::size_t j = 0; j < d; ++j) out(i, j) += vi * f.u(j, k);
    }
  }
  return out;
}

}  // namespace rangenull
