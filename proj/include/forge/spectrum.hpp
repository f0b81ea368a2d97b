#pragma once

#include "forge/grid.hpp"
#include "forge/potential.hpp"
#include "forge/wavefunction.hpp"

#include <vector>

namespace forge {

struct ShootingOptions {
  /// Absolute bisection tolerance on each level.
  double energy_tolerance = 1e-12;
  /// Upper bound accepted for the normalized matching defect of a level.
  double mismatch_tolerance = 1e-6;
  /// Minimum WKB decay exponent between the top level's turning point and
  /// each grid edge.
  double min_tail_exponent = 10.0;
};

/// Bound states E_0 < E_1 < ... with normalized eigenfunctions.
struct Spectrum {
  std::vector<double> levels;
  std::vector<WaveFunction> eigenfunctions;
  /// Normalized Casoratian of the left and right solutions at the matching
  /// point, one entry per level.
  std::vector<double> matching_defects;
  double mismatch_tolerance = 0.0;

  Index size() const { return static_cast<Index>(levels.size()); }
};

/// Levels 0..k_max by node-count bracketing of the left-shooting solution
/// followed by bisection on the matching defect at the rightmost classical
/// turning point. Throws std::runtime_error when the grid is too narrow for
/// the requested levels or a level cannot be bracketed.
Spectrum compute_spectrum(const Samples& potential, int k_max, const Grid& grid, const ShootingOptions& options = {});
Spectrum compute_spectrum(const Potential& potential, int k_max, const Grid& grid, const ShootingOptions& options = {});

/// Throws std::out_of_range for k outside the computed levels.
const WaveFunction& eigenfunction(const Spectrum& spectrum, int k);

}  // namespace forge
