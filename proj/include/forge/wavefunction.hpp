#pragma once

#include "forge/grid.hpp"
#include "forge/potential.hpp"

#include <string_view>
#include <vector>

namespace forge {

enum class Side { left, right };
enum class Asymptote { decaying, growing, undetermined };
enum class AsymptoticClass { zero_left, zero_right, zero_both, growing_both };

std::string_view to_string(Asymptote a);
std::string_view to_string(AsymptoticClass c);

/// Grid samples of a real solution of -psi'' + V psi = E psi.
class WaveFunction {
 public:
  WaveFunction(Grid grid, Samples values, double energy);

  const Grid& grid() const { return grid_; }
  const Samples& values() const { return values_; }
  double energy() const { return energy_; }
  int node_count() const { return node_count_; }
  bool normalized() const { return normalized_; }
  Asymptote asym_left() const { return asym_left_; }
  Asymptote asym_right() const { return asym_right_; }

  /// Sets the asymptotic tags from asymptotic_class(); throws like it.
  void classify_asymptotics();

  /// Rescales to unit trapezoid norm. Throws if the norm vanishes.
  void normalize();

  double operator[](Index i) const { return values_[i]; }

 private:
  friend WaveFunction mix(const WaveFunction&, const WaveFunction&, double);

  Grid grid_;
  Samples values_;
  double energy_;
  int node_count_ = 0;
  bool normalized_ = false;
  Asymptote asym_left_ = Asymptote::undetermined;
  Asymptote asym_right_ = Asymptote::undetermined;
};

/// Sample indices that count as resolved: above 1e-12 of the local
/// magnitude scale and far from underflow. Used for node counting.
std::vector<bool> resolved_samples(const Samples& values);

/// Sign changes between consecutive resolved interior samples, skipping the
/// two seed points at each edge. All-zero input returns 0.
int count_nodes(const Samples& values);
inline int count_nodes(const WaveFunction& psi) { return count_nodes(psi.values()); }

/// Interpolated x-locations of the counted nodes.
std::vector<double> node_locations(const WaveFunction& psi);

/// Numerov solution that decays toward the chosen edge. Seeds with the WKB
/// form at the two outermost points and sweeps inward, renormalizing every
/// 500 steps. The result is scaled to unit max |psi| over the classically
/// allowed region (or at the potential minimum if there is none), with the
/// first sample on the seeded side positive.
/// Throws std::domain_error if E >= V at the starting edge, std::overflow_error
/// if the sweep cannot be kept finite.
WaveFunction integrate(const Samples& potential, double energy, const Grid& grid, Side side);
WaveFunction integrate(const Potential& potential, double energy, const Grid& grid, Side side);

/// cos(theta) fL + sin(theta) fR at the common energy. Throws
/// std::invalid_argument on energy or grid mismatch.
WaveFunction mix(const WaveFunction& left, const WaveFunction& right, double theta);

/// Classifies each side by a least-squares slope of log|psi| over the outer
/// 10% of the grid. Throws std::runtime_error if a fit region contains a node
/// or underflowed samples, or if a slope is inconclusive.
AsymptoticClass asymptotic_class(const WaveFunction& psi);

struct WronskianTrace {
  Grid grid;
  Samples values;
  /// Pointwise |W| relative to |u1 u2'| + |u2 u1'|, the scale of the terms
  /// that cancel in W. A genuine zero drives it to 0 at that point.
  Samples relative;
  double min_abs = 0.0;
  double min_relative = 0.0;
  std::vector<double> zero_crossings;
  std::vector<double> extrema;

  /// No sign change and no point below threshold in the relative measure.
  bool zero_free(double threshold = 1e-10) const {
    return zero_crossings.empty() && min_relative > threshold;
  }
};

/// W = u1 u2' - u2 u1' with 5-point stencil derivatives.
WronskianTrace wronskian(const WaveFunction& u1, const WaveFunction& u2);

/// max |-f'' + (V - E) f| / max |f| over the grid without its outer 5%,
/// with f'' from the 5-point stencil.
double schrodinger_residual(const Samples& potential, const Samples& f, double energy, const Grid& grid);
inline double schrodinger_residual(const Samples& potential, const WaveFunction& f) {
  return schrodinger_residual(potential, f.values(), f.energy(), f.grid());
}

/// Sign-change locations (linear interpolation) of sampled data.
std::vector<double> zero_crossings(const Grid& grid, const Samples& f);

/// Sample positions where the forward difference of f changes sign.
std::vector<double> extremum_locations(const Grid& grid, const Samples& f);

}  // namespace forge
