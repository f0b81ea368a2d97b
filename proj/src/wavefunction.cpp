#include "forge/wavefunction.hpp"

#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace forge {

namespace {

constexpr double kNodeFloor = 1e-12;
constexpr double kUnderflow = 1e-290;
constexpr Index kRescaleEvery = 500;
constexpr double kRescaleAbove = 1e100;

}  // namespace

std::string_view to_string(Asymptote a) {
  switch (a) {
    case Asymptote::decaying: return "decaying";
    case Asymptote::growing: return "growing";
    case Asymptote::undetermined: break;
  }
  return "undetermined";
}

std::string_view to_string(AsymptoticClass c) {
  switch (c) {
    case AsymptoticClass::zero_left: return "zero_left";
    case AsymptoticClass::zero_right: return "zero_right";
    case AsymptoticClass::zero_both: return "zero_both";
    case AsymptoticClass::growing_both: break;
  }
  return "growing_both";
}

WaveFunction::WaveFunction(Grid grid, Samples values, double energy)
    : grid_(grid), values_(std::move(values)), energy_(energy) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("wavefunction size does not match grid");
  if (!values_.allFinite()) throw std::invalid_argument("wavefunction has non-finite samples");
  node_count_ = count_nodes(values_);
}

void WaveFunction::classify_asymptotics() {
  switch (asymptotic_class(*this)) {
    case AsymptoticClass::zero_both: asym_left_ = asym_right_ = Asymptote::decaying; break;
    case AsymptoticClass::zero_left: asym_left_ = Asymptote::decaying; asym_right_ = Asymptote::growing; break;
    case AsymptoticClass::zero_right: asym_left_ = Asymptote::growing; asym_right_ = Asymptote::decaying; break;
    case AsymptoticClass::growing_both: asym_left_ = asym_right_ = Asymptote::growing; break;
  }
}

void WaveFunction::normalize() {
  const double norm2 = trapezoid(values_.cwiseAbs2(), grid_.spacing());
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw std::runtime_error("cannot normalize wavefunction");
  values_ /= std::sqrt(norm2);
  normalized_ = true;
}

std::vector<bool> resolved_samples(const Samples& values) {
  const Index n = values.size();
  std::vector<bool> out(static_cast<std::size_t>(n), false);
  if (n == 0) return out;
  const Index block = std::max<Index>(8, n / 40);
  const Index nb = (n + block - 1) / block;
  std::vector<double> block_max(static_cast<std::size_t>(nb), 0.0);
  for (Index i = 0; i < n; ++i) {
    auto& m = block_max[static_cast<std::size_t>(i / block)];
    m = std::max(m, std::abs(values[i]));
  }
  for (Index i = 0; i < n; ++i) {
    const Index b = i / block;
    double scale = block_max[static_cast<std::size_t>(b)];
    if (b > 0) scale = std::max(scale, block_max[static_cast<std::size_t>(b - 1)]);
    if (b + 1 < nb) scale = std::max(scale, block_max[static_cast<std::size_t>(b + 1)]);
    const double a = std::abs(values[i]);
    out[static_cast<std::size_t>(i)] = a > kUnderflow && a > kNodeFloor * scale;
  }
  return out;
}

namespace {

// Visits sign changes between consecutive resolved samples in [first, last].
template <typename Visit>
void for_each_sign_change(const Samples& f, Index first, Index last, Visit&& visit) {
  const auto ok = resolved_samples(f);
  Index prev = -1;
  for (Index i = std::max<Index>(first, 0); i <= last && i < f.size(); ++i) {
    if (!ok[static_cast<std::size_t>(i)]) continue;
    if (prev >= 0 && std::signbit(f[prev]) != std::signbit(f[i])) visit(prev, i);
    prev = i;
  }
}

double interpolate_zero(const Grid& grid, const Samples& f, Index a, Index b) {
  const double xa = grid.x(a), xb = grid.x(b);
  return xa + (xb - xa) * f[a] / (f[a] - f[b]);
}

}  // namespace

int count_nodes(const Samples& values) {
  int nodes = 0;
  for_each_sign_change(values, 2, values.size() - 3, [&](Index, Index) { ++nodes; });
  return nodes;
}

std::vector<double> node_locations(const WaveFunction& psi) {
  std::vector<double> out;
  const auto& f = psi.values();
  for_each_sign_change(f, 2, f.size() - 3,
                       [&](Index a, Index b) { out.push_back(interpolate_zero(psi.grid(), f, a, b)); });
  return out;
}

std::vector<double> zero_crossings(const Grid& grid, const Samples& f) {
  std::vector<double> out;
  for_each_sign_change(f, 0, f.size() - 1, [&](Index a, Index b) { out.push_back(interpolate_zero(grid, f, a, b)); });
  return out;
}

std::vector<double> extremum_locations(const Grid& grid, const Samples& f) {
  const Index n = f.size();
  if (n < 3) return {};
  const Samples diff = f.tail(n - 1) - f.head(n - 1);
  std::vector<double> out;
  // Difference j spans samples j..j+1, so a change between differences a and
  // b puts the extremum at a sample in (a, b].
  for_each_sign_change(diff, 0, n - 2, [&](Index a, Index b) { out.push_back(grid.x((a + 1 + b) / 2)); });
  return out;
}

WaveFunction integrate(const Samples& v, double energy, const Grid& grid, Side side) {
  const Index n = grid.size();
  if (v.size() != n) throw std::invalid_argument("potential samples do not match grid");
  const double h = grid.spacing();
  auto at = [&](Index t) { return side == Side::left ? t : n - 1 - t; };

  const double f0 = v[at(0)] - energy;
  const double f1 = v[at(1)] - energy;
  if (!(f0 > 0.0) || !(f1 > 0.0)) {
    throw std::domain_error("energy " + std::to_string(energy) +
                            " is not below the potential at the starting edge; no decaying seed");
  }

  Samples psi = Samples::Zero(n);
  const double k0 = std::sqrt(f0), k1 = std::sqrt(f1);
  psi[at(0)] = 1.0 / std::sqrt(k0);
  psi[at(1)] = std::exp(0.5 * h * (k0 + k1)) / std::sqrt(k1);

  const double c = h * h / 12.0;
  auto weight = [&](Index t) {
    const double q = 1.0 - c * (v[at(t)] - energy);
    if (!(q > 0.0)) throw std::domain_error("grid too coarse for the Numerov recurrence at this energy");
    return q;
  };
  double q_prev = weight(0), q_cur = weight(1);
  for (Index t = 1; t + 1 < n; ++t) {
    const double q_next = weight(t + 1);
    psi[at(t + 1)] = ((12.0 - 10.0 * q_cur) * psi[at(t)] - q_prev * psi[at(t - 1)]) / q_next;
    q_prev = q_cur;
    q_cur = q_next;
    if ((t + 1) % kRescaleEvery == 0) {
      const Index lo = side == Side::left ? 0 : at(t + 1);
      const double m = psi.segment(lo, t + 2).cwiseAbs().maxCoeff();
      if (!std::isfinite(m)) throw std::overflow_error("Numerov sweep overflowed");
      if (m > kRescaleAbove) psi.segment(lo, t + 2) /= m;
    }
  }

  double scale = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (v[i] <= energy) scale = std::max(scale, std::abs(psi[i]));
  }
  if (scale == 0.0) {
    Index imin = 0;
    v.minCoeff(&imin);
    scale = std::abs(psi[imin]);
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::overflow_error("cannot normalize Numerov solution");
  psi /= scale;
  if (!psi.allFinite()) throw std::overflow_error("Numerov solution overflowed after normalization");
  return WaveFunction(grid, std::move(psi), energy);
}

WaveFunction integrate(const Potential& potential, double energy, const Grid& grid, Side side) {
  return integrate(potential.sample(grid), energy, grid, side);
}

WaveFunction mix(const WaveFunction& left, const WaveFunction& right, double theta) {
  if (!(left.grid() == right.grid())) throw std::invalid_argument("mix: grid mismatch");
  const double e = left.energy();
  if (std::abs(e - right.energy()) > 1e-12 * std::max(1.0, std::abs(e))) {
    throw std::invalid_argument("mix: energy mismatch");
  }
  Samples values = std::cos(theta) * left.values() + std::sin(theta) * right.values();
  return WaveFunction(left.grid(), std::move(values), e);
}

namespace {

// Least-squares slope of log|psi| against x over [first, last].
double log_slope(const WaveFunction& psi, Index first, Index last, std::string_view side) {
  const auto& f = psi.values();
  for (Index i = first; i <= last; ++i) {
    if (!(std::abs(f[i]) > kUnderflow)) {
      throw std::runtime_error("asymptotic fit on the " + std::string(side) + " contains underflowed samples");
    }
    if (i > first && std::signbit(f[i]) != std::signbit(f[i - 1])) {
      throw std::runtime_error("asymptotic fit on the " + std::string(side) + " contains a node");
    }
  }
  const Index m = last - first + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Index i = first; i <= last; ++i) {
    const double x = psi.grid().x(i), y = std::log(std::abs(f[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

}  // namespace

AsymptoticClass asymptotic_class(const WaveFunction& psi) {
  const Index n = psi.grid().size();
  const Index band = std::max<Index>(3, n / 10);
  const double left = log_slope(psi, 0, band - 1, "left");
  const double right = log_slope(psi, n - band, n - 1, "right");
  constexpr double kFlat = 1e-8;
  if (std::abs(left) < kFlat || std::abs(right) < kFlat) {
    throw std::runtime_error("asymptotic fit is inconclusive (flat tail)");
  }
  const bool decays_left = left > 0.0;
  const bool decays_right = right < 0.0;
  if (decays_left && decays_right) return AsymptoticClass::zero_both;
  if (decays_left) return AsymptoticClass::zero_left;
  if (decays_right) return AsymptoticClass::zero_right;
  return AsymptoticClass::growing_both;
}

WronskianTrace wronskian(const WaveFunction& u1, const WaveFunction& u2) {
  if (!(u1.grid() == u2.grid())) throw std::invalid_argument("wronskian: grid mismatch");
  const Grid& grid = u1.grid();
  const double h = grid.spacing();
  const Samples d1 = first_derivative(u1.values(), h);
  const Samples d2 = first_derivative(u2.values(), h);
  const Samples a = u1.values().cwiseProduct(d2);
  const Samples b = u2.values().cwiseProduct(d1);

  WronskianTrace w{grid, a - b, Samples::Zero(grid.size()), 0.0, 0.0, {}, {}};
  w.min_abs = w.values.cwiseAbs().minCoeff();
  w.min_relative = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < grid.size(); ++i) {
    const double scale = std::abs(a[i]) + std::abs(b[i]);
    if (!(scale > kUnderflow)) continue;
    w.relative[i] = std::abs(w.values[i]) / scale;
    w.min_relative = std::min(w.min_relative, w.relative[i]);
  }
  if (!std::isfinite(w.min_relative)) w.min_relative = 0.0;
  w.zero_crossings = zero_crossings(grid, w.values);
  w.extrema = extremum_locations(grid, w.values);
  return w;
}

double schrodinger_residual(const Samples& potential, const Samples& f, double energy, const Grid& grid) {
  const Samples r = -second_derivative(f, grid.spacing()) + (potential.array() - energy).matrix().cwiseProduct(f);
  const Index band = grid.edge_band(0.05);
  const Index len = grid.size() - 2 * band;
  const double scale = f.segment(band, len).cwiseAbs().maxCoeff();
  return scale > 0.0 ? r.segment(band, len).cwiseAbs().maxCoeff() / scale : 0.0;
}

}  // namespace forge
