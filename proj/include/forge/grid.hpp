#pragma once

#include <Eigen/Dense>

namespace forge {

using Index = Eigen::Index;
using Samples = Eigen::VectorXd;

/// Uniform discretization of a truncated real line [x_min, x_max].
class Grid {
 public:
  /// Throws std::invalid_argument unless n >= 11 and x_min < 0 < x_max.
  Grid(double x_min, double x_max, Index n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  Index size() const { return n_; }
  double spacing() const { return h_; }

  double x(Index i) const { return i == n_ - 1 ? x_max_ : x_min_ + static_cast<double>(i) * h_; }
  Samples points() const;

  /// Index of the sample closest to x, clamped to the grid.
  Index nearest(double x) const;

  /// Number of samples in the outer `fraction` of the grid on each side
  /// (fraction of the full width, split evenly), at least 2.
  Index edge_band(double fraction) const;

  bool operator==(const Grid&) const = default;

 private:
  double x_min_;
  double x_max_;
  Index n_;
  double h_;
};

}  // namespace forge
