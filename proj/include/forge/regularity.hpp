#pragma once

#include "forge/darboux.hpp"
#include "forge/spectrum.hpp"
#include "forge/wavefunction.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace forge {

/// How a transformation function is picked at its energy.
struct Selector {
  enum class Kind { eigenstate, mixed, target_nodes, pure_left, pure_right };
  Kind kind = Kind::target_nodes;
  double theta = 0.0;  // mixed
  int nodes = 0;       // target_nodes

  static Selector eigenstate() { return {Kind::eigenstate}; }
  static Selector mixed(double theta) { return {Kind::mixed, theta}; }
  static Selector target(int nodes) { return {Kind::target_nodes, 0.0, nodes}; }
  static Selector pure_left() { return {Kind::pure_left}; }
  static Selector pure_right() { return {Kind::pure_right}; }
};

/// Parses "eigenstate", "pure_left", "pure_right", "mixed:<theta>" or
/// "nodes:<n>". Throws std::invalid_argument.
Selector parse_selector(std::string_view text);
std::string to_string(const Selector& s);

/// Gap index k with transformation energies E_{k+1} >= alpha2 > alpha1 >= E_k.
struct TransformSpec {
  int k = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  Selector u1;
  Selector u2;
};

/// Tolerance for identifying a transformation energy with a level.
inline constexpr double kLevelMatch = 1e-6;

/// Checks the ordering against the spectrum and the selector rules: an
/// eigenstate selector needs alpha equal to a level; a level-valued alpha
/// needs an eigenstate selector. Returns the spec with eigenstate alphas
/// snapped to the computed levels. Throws std::invalid_argument.
TransformSpec validate(const TransformSpec& spec, const Spectrum& spectrum);

/// Scans theta over a uniform partition of [0, pi) for a mix of the two
/// one-sided solutions that has `target_nodes` nodes and grows at both
/// infinities; the partition is refined x10 once if the first pass misses.
/// Throws std::runtime_error with the observed node range on failure.
WaveFunction construct_u_with_nodes(const Samples& potential, double alpha, int target_nodes,
                                    const Spectrum& spectrum, const Grid& grid, int theta_points = 256);

/// Builds u for a selector. `level` names the eigenstate used by
/// Selector::eigenstate. Asymptotic tags are set on the result.
WaveFunction construct_transformation_function(const Samples& potential, double alpha, const Selector& selector,
                                               int level, const Spectrum& spectrum, const Grid& grid);

struct ZeroInterleave {
  bool alternating = false;
  int n1 = 0;
  int n2 = 0;
  /// All zeros of u1 and u2 in increasing order.
  std::vector<double> merged;
};

/// True iff the merged zero sequence alternates between u1 and u2 and the
/// counts differ by exactly one.
ZeroInterleave check_alternating_zeros(const WaveFunction& u1, const WaveFunction& u2);

enum class TheoremCase { sec4_main, sec5_W_to_zero, sec5_alpha1_eq_Ek, unknown };
std::string_view to_string(TheoremCase c);

struct RegularityReport {
  int k = -1;
  int n1 = 0;
  int n2 = 0;
  bool alternating = false;
  std::vector<double> merged_zeros;
  double min_abs_W = 0.0;
  double max_abs_W = 0.0;
  double min_relative_W = 0.0;
  bool zero_free = false;
  TheoremCase theorem_case = TheoremCase::unknown;
  /// Every extremum of W within one cell of a zero of u1 u2.
  bool extrema_at_zeros = false;
  /// W keeps one sign between the outermost merged zeros.
  bool single_signed = false;
  /// No interior extremum of W between consecutive merged zeros.
  bool monotone_segments = false;
};

RegularityReport verify_wronskian_regularity(const DarbouxPair& pair, const Spectrum& spectrum);

/// max over interior points of |W'_stencil - (alpha1 - alpha2) u1 u2|,
/// normalized by max |W'| (floored at 1e-8 max |W| when W is flat).
double check_W_derivative_identity(const WaveFunction& u1, const WaveFunction& u2, double alpha1, double alpha2);

}  // namespace forge
