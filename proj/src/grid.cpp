#include "forge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forge {

Grid::Grid(double x_min, double x_max, Index n) : x_min_(x_min), x_max_(x_max), n_(n), h_(0.0) {
  if (n < 11) throw std::invalid_argument("grid needs at least 11 points");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < 0.0 && 0.0 < x_max)) {
    throw std::invalid_argument("grid must satisfy x_min < 0 < x_max");
  }
  h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Samples Grid::points() const {
  Samples xs(n_);
  for (Index i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

Index Grid::nearest(double x) const {
  const double t = std::round((x - x_min_) / h_);
  return static_cast<Index>(std::clamp(t, 0.0, static_cast<double>(n_ - 1)));
}

Index Grid::edge_band(double fraction) const {
  const auto band = static_cast<Index>(std::floor(0.5 * fraction * static_cast<double>(n_ - 1)));
  return std::clamp<Index>(band, 2, n_ / 2);
}

}  // namespace forge
