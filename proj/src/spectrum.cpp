#include "forge/spectrum.hpp"

#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace forge {

namespace {

class Shooter {
 public:
  Shooter(const Samples& v, const Grid& grid) : v_(v), grid_(grid) {}

  int nodes(double e) const { return integrate(v_, e, grid_, Side::left).node_count(); }

  Index matching_index(double e) const {
    Index m = -1;
    for (Index i = grid_.size() - 1; i >= 0; --i) {
      if (v_[i] <= e) {
        m = i;
        break;
      }
    }
    if (m < 0) v_.minCoeff(&m);
    return std::clamp<Index>(m, 2, grid_.size() - 3);
  }

  double defect(double e, Index m) const {
    const auto l = integrate(v_, e, grid_, Side::left);
    const auto r = integrate(v_, e, grid_, Side::right);
    const double a0 = l[m], a1 = l[m + 1], b0 = r[m], b1 = r[m + 1];
    return (a0 * b1 - a1 * b0) / (std::hypot(a0, a1) * std::hypot(b0, b1));
  }

  WaveFunction glued(double e, Index m) const {
    const auto l = integrate(v_, e, grid_, Side::left);
    const auto r = integrate(v_, e, grid_, Side::right);
    double num = 0.0, den = 0.0;
    for (Index i = m - 1; i <= m + 1; ++i) {
      num += l[i] * r[i];
      den += r[i] * r[i];
    }
    const double s = num / den;
    Samples psi(grid_.size());
    psi.head(m + 1) = l.values().head(m + 1);
    psi.tail(grid_.size() - m - 1) = s * r.values().tail(grid_.size() - m - 1);
    WaveFunction out(grid_, std::move(psi), e);
    out.normalize();
    return out;
  }

  double tail_exponent(double e) const {
    // WKB decay exponent from the outermost turning points to the edges.
    const double h = grid_.spacing();
    double left = 0.0, right = 0.0;
    for (Index i = 0; i < grid_.size() && v_[i] > e; ++i) left += h * std::sqrt(v_[i] - e);
    for (Index i = grid_.size() - 1; i >= 0 && v_[i] > e; --i) right += h * std::sqrt(v_[i] - e);
    return std::min(left, right);
  }

 private:
  const Samples& v_;
  const Grid& grid_;
};

}  // namespace

Spectrum compute_spectrum(const Samples& v, int k_max, const Grid& grid, const ShootingOptions& options) {
  if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
  if (v.size() != grid.size()) throw std::invalid_argument("potential samples do not match grid");
  const Shooter shoot(v, grid);
  const double edge = std::min(v[0], v[grid.size() - 1]);
  const double floor = v.minCoeff();
  if (!(edge > floor)) throw std::runtime_error("potential does not rise toward the grid edges");

  // Ceiling energy whose left solution already carries k_max + 1 nodes.
  double top = floor;
  double step = 1.0;
  for (int iter = 0;; ++iter) {
    double next = floor + step;
    if (next >= edge) next = 0.5 * (top + edge);
    if (iter > 200 || edge - next < 1e-9 * std::max(1.0, std::abs(edge))) {
      throw std::runtime_error("grid too narrow: level " + std::to_string(k_max) +
                               " is not below the potential at the grid edges");
    }
    top = next;
    if (shoot.nodes(top) >= k_max + 1) break;
    step *= 2.0;
  }

  Spectrum out;
  out.mismatch_tolerance = options.mismatch_tolerance;
  double lo_floor = floor;
  for (int k = 0; k <= k_max; ++k) {
    double lo = lo_floor, hi = top;
    // Node-count bisection down to a bracket holding exactly E_k.
    const double coarse = 1e-3 * std::max(1.0, std::abs(hi - lo));
    while (hi - lo > coarse) {
      const double mid = 0.5 * (lo + hi);
      (shoot.nodes(mid) <= k ? lo : hi) = mid;
    }
    const Index m = shoot.matching_index(hi);
    double d_lo = shoot.defect(lo, m);
    double d_hi = shoot.defect(hi, m);
    int guard = 0;
    while (std::signbit(d_lo) == std::signbit(d_hi)) {
      // Tighten with node counts until the defect changes sign.
      if (++guard > 60) throw std::runtime_error("cannot bracket level " + std::to_string(k));
      const double mid = 0.5 * (lo + hi);
      if (shoot.nodes(mid) <= k) {
        lo = mid;
        d_lo = shoot.defect(lo, m);
      } else {
        hi = mid;
        d_hi = shoot.defect(hi, m);
      }
    }
    while (hi - lo > options.energy_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double d = shoot.defect(mid, m);
      if (std::signbit(d) == std::signbit(d_lo)) {
        lo = mid;
        d_lo = d;
      } else {
        hi = mid;
        d_hi = d;
      }
    }
    const double e = 0.5 * (lo + hi);
    if (k == k_max && shoot.tail_exponent(e) < options.min_tail_exponent) {
      throw std::runtime_error("grid too narrow: turning point of level " + std::to_string(k) +
                               " is too close to the grid edge");
    }
    const double defect = shoot.defect(e, m);
    if (std::abs(defect) > options.mismatch_tolerance) {
      throw std::runtime_error("level " + std::to_string(k) + " did not converge (matching defect " +
                               std::to_string(defect) + ")");
    }
    auto psi = shoot.glued(e, m);
    if (psi.node_count() != k) {
      throw std::runtime_error("eigenfunction " + std::to_string(k) + " has " + std::to_string(psi.node_count()) +
                               " nodes");
    }
    out.levels.push_back(e);
    out.matching_defects.push_back(defect);
    out.eigenfunctions.push_back(std::move(psi));
    lo_floor = hi;
  }
  return out;
}

Spectrum compute_spectrum(const Potential& potential, int k_max, const Grid& grid, const ShootingOptions& options) {
  return compute_spectrum(potential.sample(grid), k_max, grid, options);
}

const WaveFunction& eigenfunction(const Spectrum& spectrum, int k) {
  if (k < 0 || k >= static_cast<int>(spectrum.levels.size())) {
    throw std::out_of_range("eigenfunction index " + std::to_string(k) + " out of range");
  }
  return spectrum.eigenfunctions[static_cast<std::size_t>(k)];
}

}  // namespace forge
