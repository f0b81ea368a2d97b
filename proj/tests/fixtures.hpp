#pragma once

#include "forge/susy.hpp"

#include <vector>

namespace fixture {

using namespace forge;

inline const Grid& grid() {
  static const Grid g(-10.0, 10.0, 20001);
  return g;
}

inline const Potential& oscillator() {
  static const Potential v = make_builtin_potential("harmonic", std::vector<double>{1.0});
  return v;
}

inline const Samples& oscillator_samples() {
  static const Samples s = oscillator().sample(grid());
  return s;
}

/// Levels 0..19 of x^2 on the default grid.
inline const Spectrum& oscillator_spectrum() {
  static const Spectrum s = compute_spectrum(oscillator(), 19, grid());
  return s;
}

inline DarbouxPair make_pair(double a1, const Selector& s1, double a2, const Selector& s2, int k = 0) {
  const auto& sp = oscillator_spectrum();
  const auto u1 = construct_transformation_function(oscillator_samples(), a1, s1, k, sp, grid());
  const auto u2 = construct_transformation_function(oscillator_samples(), a2, s2, k + 1, sp, grid());
  return second_order_transform(oscillator(), u1, u2);
}

inline const DarbouxPair& krein() {
  static const DarbouxPair p = make_pair(1.0, Selector::eigenstate(), 3.0, Selector::eigenstate());
  return p;
}

inline const DarbouxPair& case_a() {
  static const DarbouxPair p = make_pair(1.5, Selector::target(2), 2.5, Selector::target(1));
  return p;
}

inline double max_abs(const Samples& f) { return f.cwiseAbs().maxCoeff(); }

}  // namespace fixture
