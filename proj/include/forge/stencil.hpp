#pragma once

// Fourth-order finite-difference stencils and quadrature on uniform grids.
// Interior points use 5-point central formulas; the two outermost points on
// each side use one-sided 5-point formulas of the same order.

#include <Eigen/Dense>

#include <cassert>

namespace forge {

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> first_derivative(
    const Eigen::MatrixBase<Derived>& f, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = f.size();
  assert(n >= 5);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(n);
  const Scalar c = Scalar(1) / (Scalar(12) * h);
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    d[i] = (f[i - 2] - Scalar(8) * f[i - 1] + Scalar(8) * f[i + 1] - f[i + 2]) * c;
  }
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) * c;
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) * c;
  d[n - 1] = -(-25 * f[n - 1] + 48 * f[n - 2] - 36 * f[n - 3] + 16 * f[n - 4] - 3 * f[n - 5]) * c;
  d[n - 2] = -(-3 * f[n - 1] - 10 * f[n - 2] + 18 * f[n - 3] - 6 * f[n - 4] + f[n - 5]) * c;
  return d;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> second_derivative(
    const Eigen::MatrixBase<Derived>& f, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = f.size();
  assert(n >= 6);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(n);
  const Scalar c = Scalar(1) / (Scalar(12) * h * h);
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    d[i] = (-f[i - 2] + Scalar(16) * f[i - 1] - Scalar(30) * f[i] + Scalar(16) * f[i + 1] - f[i + 2]) * c;
  }
  d[0] = (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]) * c;
  d[1] = (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]) * c;
  d[n - 1] = (45 * f[n - 1] - 154 * f[n - 2] + 214 * f[n - 3] - 156 * f[n - 4] + 61 * f[n - 5] - 10 * f[n - 6]) * c;
  d[n - 2] = (10 * f[n - 1] - 15 * f[n - 2] - 4 * f[n - 3] + 14 * f[n - 4] - 6 * f[n - 5] + f[n - 6]) * c;
  return d;
}

/// Composite trapezoid rule over samples with uniform spacing h.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::MatrixBase<Derived>& f, typename Derived::Scalar h) {
  const Eigen::Index n = f.size();
  if (n < 2) return typename Derived::Scalar(0);
  return h * (f.sum() - typename Derived::Scalar(0.5) * (f[0] + f[n - 1]));
}

}  // namespace forge
