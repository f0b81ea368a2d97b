#include "forge/regularity.hpp"

#include "forge/csv.hpp"
#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace forge {

Selector parse_selector(std::string_view text) {
  text = csv::trim(text);
  if (text == "eigenstate") return Selector::eigenstate();
  if (text == "pure_left") return Selector::pure_left();
  if (text == "pure_right") return Selector::pure_right();
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    const auto head = text.substr(0, colon);
    const auto value = csv::parse_number(text.substr(colon + 1));
    if (value && head == "mixed") return Selector::mixed(*value);
    if (value && head == "nodes" && *value >= 0 && std::floor(*value) == *value) {
      return Selector::target(static_cast<int>(*value));
    }
  }
  throw std::invalid_argument("unknown selector '" + std::string(text) + "'");
}

std::string to_string(const Selector& s) {
  switch (s.kind) {
    case Selector::Kind::eigenstate: return "eigenstate";
    case Selector::Kind::pure_left: return "pure_left";
    case Selector::Kind::pure_right: return "pure_right";
    case Selector::Kind::mixed: return "mixed:" + csv::format(s.theta);
    case Selector::Kind::target_nodes: break;
  }
  return "nodes:" + std::to_string(s.nodes);
}

namespace {

bool matches_level(double alpha, double level) { return std::abs(alpha - level) <= kLevelMatch; }

double level(const Spectrum& spectrum, int k) {
  if (k < 0 || k >= spectrum.size()) {
    throw std::invalid_argument("spectrum does not cover level " + std::to_string(k));
  }
  return spectrum.levels[static_cast<std::size_t>(k)];
}

// Gap index k with E_k < alpha < E_{k+1}; rejects alpha at a level.
int gap_index(double alpha, const Spectrum& spectrum) {
  for (std::size_t i = 0; i < spectrum.levels.size(); ++i) {
    if (matches_level(alpha, spectrum.levels[i])) {
      throw std::invalid_argument("alpha coincides with level " + std::to_string(i) +
                                  "; use the eigenstate selector");
    }
  }
  for (std::size_t i = 0; i + 1 < spectrum.levels.size(); ++i) {
    if (spectrum.levels[i] < alpha && alpha < spectrum.levels[i + 1]) return static_cast<int>(i);
  }
  throw std::invalid_argument("alpha is not inside a gap covered by the spectrum");
}

bool grows_both(const WaveFunction& f) {
  try {
    return asymptotic_class(f) == AsymptoticClass::growing_both;
  } catch (const std::runtime_error&) {
    return false;
  }
}

}  // namespace

TransformSpec validate(const TransformSpec& spec, const Spectrum& spectrum) {
  TransformSpec out = spec;
  const double lower = level(spectrum, spec.k);
  const double upper = level(spectrum, spec.k + 1);
  if (!(spec.alpha2 > spec.alpha1)) throw std::invalid_argument("alpha ordering violated: need alpha2 > alpha1");

  const bool eig1 = spec.u1.kind == Selector::Kind::eigenstate;
  const bool eig2 = spec.u2.kind == Selector::Kind::eigenstate;
  if (eig1 != matches_level(spec.alpha1, lower)) {
    throw std::invalid_argument(eig1 ? "u1 eigenstate selector needs alpha1 = E_k"
                                     : "alpha1 = E_k requires the eigenstate selector");
  }
  if (eig2 != matches_level(spec.alpha2, upper)) {
    throw std::invalid_argument(eig2 ? "u2 eigenstate selector needs alpha2 = E_{k+1}"
                                     : "alpha2 = E_{k+1} requires the eigenstate selector");
  }
  if (eig1) out.alpha1 = lower;
  if (eig2) out.alpha2 = upper;
  if (!(out.alpha1 >= lower && out.alpha2 <= upper)) {
    throw std::invalid_argument("transformation energies must satisfy E_{k+1} >= alpha2 > alpha1 >= E_k");
  }
  return out;
}

WaveFunction construct_u_with_nodes(const Samples& potential, double alpha, int target_nodes,
                                    const Spectrum& spectrum, const Grid& grid, int theta_points) {
  const int k = gap_index(alpha, spectrum);
  if (target_nodes != k + 1 && target_nodes != k + 2) {
    throw std::invalid_argument("target node count must be k+1 or k+2 in gap " + std::to_string(k));
  }
  const auto left = integrate(potential, alpha, grid, Side::left);
  const auto right = integrate(potential, alpha, grid, Side::right);

  int seen_min = 1 << 30, seen_max = -1;
  for (int points : {theta_points, 10 * theta_points}) {
    for (int j = 0; j < points; ++j) {
      const double theta = std::numbers::pi * j / points;
      auto u = mix(left, right, theta);
      seen_min = std::min(seen_min, u.node_count());
      seen_max = std::max(seen_max, u.node_count());
      if (u.node_count() == target_nodes && grows_both(u)) {
        u.classify_asymptotics();
        return u;
      }
    }
  }
  throw std::runtime_error("no theta gives a growing solution with " + std::to_string(target_nodes) +
                           " nodes at alpha=" + csv::format(alpha) + " (observed " + std::to_string(seen_min) +
                           ".." + std::to_string(seen_max) + ")");
}

WaveFunction construct_transformation_function(const Samples& potential, double alpha, const Selector& selector,
                                               int level_index, const Spectrum& spectrum, const Grid& grid) {
  switch (selector.kind) {
    case Selector::Kind::eigenstate: {
      if (!matches_level(alpha, level(spectrum, level_index))) {
        throw std::invalid_argument("eigenstate selector: alpha does not match E_" + std::to_string(level_index));
      }
      auto u = eigenfunction(spectrum, level_index);
      u.classify_asymptotics();
      return u;
    }
    case Selector::Kind::target_nodes:
      return construct_u_with_nodes(potential, alpha, selector.nodes, spectrum, grid);
    case Selector::Kind::mixed:
    case Selector::Kind::pure_left:
    case Selector::Kind::pure_right: {
      gap_index(alpha, spectrum);
      auto left = integrate(potential, alpha, grid, Side::left);
      if (selector.kind == Selector::Kind::pure_left) {
        left.classify_asymptotics();
        return left;
      }
      auto right = integrate(potential, alpha, grid, Side::right);
      if (selector.kind == Selector::Kind::pure_right) {
        right.classify_asymptotics();
        return right;
      }
      auto u = mix(left, right, selector.theta);
      u.classify_asymptotics();
      return u;
    }
  }
  throw std::logic_error("unhandled selector");
}

ZeroInterleave check_alternating_zeros(const WaveFunction& u1, const WaveFunction& u2) {
  const auto z1 = node_locations(u1);
  const auto z2 = node_locations(u2);
  ZeroInterleave out;
  out.n1 = static_cast<int>(z1.size());
  out.n2 = static_cast<int>(z2.size());
  std::vector<std::pair<double, int>> tagged;
  for (double z : z1) tagged.emplace_back(z, 1);
  for (double z : z2) tagged.emplace_back(z, 2);
  std::sort(tagged.begin(), tagged.end());
  bool alternates = true;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    out.merged.push_back(tagged[i].first);
    if (i > 0 && tagged[i].second == tagged[i - 1].second) alternates = false;
  }
  out.alternating = alternates && std::abs(out.n1 - out.n2) == 1;
  return out;
}

std::string_view to_string(TheoremCase c) {
  switch (c) {
    case TheoremCase::sec4_main: return "sec4_main";
    case TheoremCase::sec5_W_to_zero: return "sec5_W_to_zero";
    case TheoremCase::sec5_alpha1_eq_Ek: return "sec5_alpha1_eq_Ek";
    case TheoremCase::unknown: break;
  }
  return "unknown";
}

namespace {

bool square_integrable(const WaveFunction& u) {
  try {
    return asymptotic_class(u) == AsymptoticClass::zero_both;
  } catch (const std::runtime_error&) {
    return false;
  }
}

}  // namespace

RegularityReport verify_wronskian_regularity(const DarbouxPair& pair, const Spectrum& spectrum) {
  RegularityReport r;
  const auto& w = pair.w;
  const Grid& grid = pair.grid;
  const double h = grid.spacing();

  r.k = -1;
  for (std::size_t i = 0; i < spectrum.levels.size(); ++i) {
    if (spectrum.levels[i] <= pair.alpha1 + kLevelMatch) r.k = static_cast<int>(i);
  }
  const auto zeros = check_alternating_zeros(pair.u1, pair.u2);
  r.n1 = zeros.n1;
  r.n2 = zeros.n2;
  r.alternating = zeros.alternating;
  r.merged_zeros = zeros.merged;
  r.min_abs_W = w.values.cwiseAbs().minCoeff();
  r.max_abs_W = w.values.cwiseAbs().maxCoeff();
  r.min_relative_W = w.min_relative;
  r.zero_free = w.zero_free();

  r.extrema_at_zeros = std::all_of(w.extrema.begin(), w.extrema.end(), [&](double x) {
    return std::any_of(zeros.merged.begin(), zeros.merged.end(),
                       [&](double z) { return std::abs(z - x) <= h * (1.0 + 1e-9); });
  });

  r.single_signed = true;
  r.monotone_segments = true;
  if (!zeros.merged.empty()) {
    const double lo = zeros.merged.front(), hi = zeros.merged.back();
    for (double z : w.zero_crossings) {
      if (z >= lo && z <= hi) r.single_signed = false;
    }
    for (std::size_t j = 0; j + 1 < zeros.merged.size(); ++j) {
      const Index a = grid.nearest(zeros.merged[j]) + 2;
      const Index b = grid.nearest(zeros.merged[j + 1]) - 2;
      int sign = 0;
      for (Index i = a; i < b; ++i) {
        const double d = w.values[i + 1] - w.values[i];
        if (d == 0.0) continue;
        const int s = d > 0.0 ? 1 : -1;
        if (sign != 0 && s != sign) r.monotone_segments = false;
        sign = s;
      }
    }
  }

  const bool alpha1_at_level = r.k >= 0 && std::abs(pair.alpha1 - spectrum.levels[static_cast<std::size_t>(r.k)]) <= kLevelMatch;
  const bool l2_1 = square_integrable(pair.u1);
  const bool l2_2 = square_integrable(pair.u2);
  if (r.k >= 0 && !alpha1_at_level && r.n1 == r.k + 2 && r.n2 == r.k + 1 && r.alternating) {
    r.theorem_case = TheoremCase::sec4_main;
  } else if (l2_1 && l2_2) {
    r.theorem_case = TheoremCase::sec5_W_to_zero;
  } else if (alpha1_at_level && l2_1 && r.n1 == r.k && r.n2 == r.k + 1) {
    r.theorem_case = TheoremCase::sec5_alpha1_eq_Ek;
  }
  return r;
}

double check_W_derivative_identity(const WaveFunction& u1, const WaveFunction& u2, double alpha1, double alpha2) {
  const auto w = wronskian(u1, u2);
  const Grid& grid = u1.grid();
  const Samples dw = first_derivative(w.values, grid.spacing());
  const Index n = grid.size();
  double worst = 0.0, scale = 0.0;
  for (Index i = 2; i < n - 2; ++i) {
    worst = std::max(worst, std::abs(dw[i] - (alpha1 - alpha2) * u1[i] * u2[i]));
    scale = std::max(scale, std::abs(dw[i]));
  }
  scale = std::max(scale, 1e-8 * w.values.cwiseAbs().maxCoeff());
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace forge
