#include "rangenull/linear_operator.hpp"

#include <algorithm>
#include <cmath>

#include "rangenull/errors.hpp"
#include "rangenull/rng.hpp"
#include "rangenull/svd.hpp"

namespace rangenull {

ImageTensor LinearOperator::apply_forward(const ImageTensor& x) const {
  require_same_shape(x.shape(), in_shape(), (name() + " forward").c_str());
  return forward(x);
}

ImageTensor LinearOperator::apply_pinv(const ImageTensor& y) const {
  require_same_shape(y.shape(), out_shape(), (name() + " pinv").c_str());
  return pinv(y);
}

DenseOperator::DenseOperator(Matrix a, double tol)
    : DenseOperator(a, pinv_from_svd(svd(a), tol)) {}

DenseOperator::DenseOperator(Matrix a, Matrix a_pinv)
    : DenseOperator(a, a_pinv, Shape{1, 1, a.cols()}, Shape{1, 1, a.rows()}) {}

DenseOperator::DenseOperator(Matrix a, Matrix a_pinv, Shape in, Shape out)
    : a_(std::move(a)), a_pinv_(std::move(a_pinv)), in_(in), out_(out) {
  if (a_pinv_.rows() != a_.cols() || a_pinv_.cols() != a_.rows()) {
    throw ContractError("dense operator: pseudo-inverse must be the transpose shape of A");
  }
  if (in_.size() != a_.cols() || out_.size() != a_.rows()) {
    throw ContractError("dense operator: tensor shapes do not match matrix dimensions");
  }
}

ImageTensor DenseOperator::forward(const ImageTensor& x) const {
  return ImageTensor(out_, multiply(a_, x.data()));
}

ImageTensor DenseOperator::pinv(const ImageTensor& y) const {
  return ImageTensor(in_, multiply(a_pinv_, y.data()));
}

ImageTensor range_project(const LinearOperator& op, const ImageTensor& x) {
  return op.pinv(op.apply_forward(x));
}

ImageTensor null_project(const LinearOperator& op, const ImageTensor& x) {
  return subtract(x, range_project(op, x));
}

ImageTensor generic_pd(const LinearOperator& op, const ImageTensor& y, const ImageTensor& x_raw) {
  return add(op.apply_pinv(y), null_project(op, x_raw));
}

double MpResiduals::max() const { return std::max({r1, r2, r3, r4}); }

namespace {

double inner(const ImageTensor& a, const ImageTensor& b) {
  double acc = 0.0;
  auto pa = a.data();
  auto pb = b.data();
  for (std::size_t i = 0; i < pa.size(); ++i) acc += pa[i] * pb[i];
  return acc;
}

}  // namespace

MpResiduals mp_residuals(const LinearOperator& op, int trials, std::uint64_t seed) {
  if (trials < 1) throw ContractError("mp_residuals: trials must be >= 1");
  Rng rng(seed);
  MpResiduals r;
  const Shape in = op.in_shape();
  const Shape out = op.out_shape();
  for (int t = 0; t < trials; ++t) {
    const ImageTensor x = random_tensor(in, rng, -1.0, 1.0);
    const ImageTensor y = random_tensor(out, rng, -1.0, 1.0);

    const ImageTensor ax = op.forward(x);
    r.r1 = std::max(r.r1, max_abs_diff(op.forward(op.pinv(ax)), ax));

    const ImageTensor py = op.pinv(y);
    r.r2 = std::max(r.r2, max_abs_diff(op.pinv(op.forward(py)), py));

    const ImageTensor u = random_tensor(out, rng, -1.0, 1.0);
    const ImageTensor v = random_tensor(out, rng, -1.0, 1.0);
    r.r3 = std::max(r.r3, std::abs(inner(u, op.forward(op.pinv(v))) -
                                   inner(op.forward(op.pinv(u)), v)));

    const ImageTensor s = random_tensor(in, rng, -1.0, 1.0);
    const ImageTensor w = random_tensor(in, rng, -1.0, 1.0);
    r.r4 = std::max(r.r4, std::abs(inner(s, op.pinv(op.forward(w))) -
                                   inner(op.pinv(op.forward(s)), w)));
  }
  return r;
}

}  // namespace rangenull
