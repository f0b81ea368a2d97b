#include "forge/darboux.hpp"

#include "forge/csv.hpp"
#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace forge {

std::string_view to_string(ChainClass c) {
  return c == ChainClass::completely_reducible ? "completely_reducible" : "irreducible_singular";
}

namespace {

void mark_poles(const Grid& grid, const std::vector<double>& zeros, PoledSamples& out) {
  const double h = grid.spacing();
  for (double z : zeros) {
    out.poles.push_back(z);
    const Index c = grid.nearest(z);
    for (Index i = std::max<Index>(0, c - 1); i <= std::min(grid.size() - 1, c + 1); ++i) {
      if (std::abs(grid.x(i) - z) <= h) out.is_pole[static_cast<std::size_t>(i)] = true;
    }
  }
}

// V - 2 (f''/f - (f'/f)^2) away from the zeros of f.
PoledSamples log_transform(const Grid& grid, const Samples& v, const Samples& f, const Samples& d1, const Samples& d2,
                           std::vector<double> zeros) {
  PoledSamples out{Samples::Zero(grid.size()), std::vector<bool>(static_cast<std::size_t>(grid.size()), false), {}};
  for (Index i = 0; i < grid.size(); ++i) {
    if (f[i] == 0.0) zeros.push_back(grid.x(i));
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end()), zeros.end());
  mark_poles(grid, zeros, out);
  for (Index i = 0; i < grid.size(); ++i) {
    if (out.is_pole[static_cast<std::size_t>(i)]) continue;
    const double r1 = d1[i] / f[i];
    out.values[i] = v[i] - 2.0 * (d2[i] / f[i] - r1 * r1);
  }
  return out;
}

PoledSamples log_transform(const Grid& grid, const Samples& v, const Samples& f, std::vector<double> zeros) {
  const double h = grid.spacing();
  return log_transform(grid, v, f, first_derivative(f, h), second_derivative(f, h), std::move(zeros));
}

void require_regular(const DarbouxPair& pair) {
  if (!pair.regular()) throw std::domain_error("Darboux pair is not regular: W has zeros on the grid");
}

}  // namespace

PoledSamples first_order_transform(const Grid& grid, const Samples& v0, const Samples& u) {
  return log_transform(grid, v0, u, zero_crossings(grid, u));
}

PoledSamples first_order_transform(const Potential& v0, const WaveFunction& u) {
  return first_order_transform(u.grid(), v0.sample(u.grid()), u.values());
}

DarbouxPair second_order_transform(const Potential& v0, const WaveFunction& u1, const WaveFunction& u2) {
  if (!(u1.grid() == u2.grid())) throw std::invalid_argument("transformation functions live on different grids");
  if (!(u2.energy() > u1.energy())) throw std::invalid_argument("alpha ordering violated: need alpha2 > alpha1");
  const Grid& grid = u1.grid();
  const double h = grid.spacing();
  const Samples v = v0.sample(grid);

  auto w = wronskian(u1, u2);
  if (w.values.cwiseAbs().maxCoeff() == 0.0 || w.relative.maxCoeff() < 1e-12) {
    throw std::invalid_argument("degenerate transformation functions: W vanishes identically");
  }

  // Poles of V2: sign changes of W plus points where W nearly vanishes.
  std::vector<double> w_zeros = w.zero_crossings;
  if (w_zeros.empty() && !w.zero_free()) {
    Index imin = 0;
    w.relative.minCoeff(&imin);
    w_zeros.push_back(grid.x(imin));
  }
  const double a1 = u1.energy(), a2 = u2.energy();
  const Samples du1 = first_derivative(u1.values(), h);
  const Samples du2 = first_derivative(u2.values(), h);
  // W' = (a1 - a2) u1 u2, so W'' needs only first derivatives of u1 and u2.
  const Samples dw = (a1 - a2) * u1.values().cwiseProduct(u2.values());
  const Samples d2w = (a1 - a2) * (du1.cwiseProduct(u2.values()) + u1.values().cwiseProduct(du2));
  PoledSamples v2 = log_transform(grid, v, w.values, dw, d2w, w_zeros);
  PoledSamples v1 = first_order_transform(grid, v, u1.values());

  Samples p(grid.size()), q(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double d = (v[i] - a2) * du1[i] * u2[i] - (v[i] - a1) * u1[i] * du2[i];
    p[i] = -(a1 - a2) * u1[i] * u2[i] / w.values[i];
    q[i] = d / w.values[i];
  }

  std::optional<Potential> v2_potential;
  if (v2.regular()) {
    const Samples xs = grid.points();
    v2_potential = Potential::tabulated({xs.data(), xs.data() + xs.size()},
                                        {v2.values.data(), v2.values.data() + v2.values.size()});
  }
  const ChainClass chain = v1.regular() ? ChainClass::completely_reducible : ChainClass::irreducible_singular;
  return DarbouxPair{v0,    grid, v,  u1, u2, a1, a2, std::move(w), std::move(v1), std::move(v2), std::move(v2_potential),
                     chain, std::move(p), std::move(q)};
}

WaveFunction apply_L(const DarbouxPair& pair, const WaveFunction& psi) {
  require_regular(pair);
  if (!(psi.grid() == pair.grid)) throw std::invalid_argument("apply_L: grid mismatch");
  const double e = psi.energy();
  const Samples d = first_derivative(psi.values(), pair.grid.spacing());
  Samples out(pair.grid.size());
  for (Index i = 0; i < out.size(); ++i) {
    out[i] = (pair.v0_samples[i] - e) * psi[i] + pair.coeff_p[i] * d[i] + pair.coeff_q[i] * psi[i];
  }
  return WaveFunction(pair.grid, std::move(out), e);
}

Samples apply_L(const DarbouxPair& pair, const Samples& f) {
  require_regular(pair);
  const double h = pair.grid.spacing();
  const Samples d1 = first_derivative(f, h);
  const Samples d2 = second_derivative(f, h);
  return d2 + pair.coeff_p.cwiseProduct(d1) + pair.coeff_q.cwiseProduct(f);
}

namespace {

Samples adjoint_lower_terms(const DarbouxPair& pair, const Samples& g) {
  const Samples d1 = first_derivative(g, pair.grid.spacing());
  const Samples dp = 0.5 * (pair.v2.values - pair.v0_samples);
  return -pair.coeff_p.cwiseProduct(d1) + (pair.coeff_q - dp).cwiseProduct(g);
}

}  // namespace

Samples apply_L_adjoint(const DarbouxPair& pair, const Samples& g) {
  require_regular(pair);
  return second_derivative(g, pair.grid.spacing()) + adjoint_lower_terms(pair, g);
}

Samples apply_L_adjoint(const DarbouxPair& pair, const WaveFunction& g) {
  require_regular(pair);
  const Samples d2 = (pair.v2.values.array() - g.energy()).matrix().cwiseProduct(g.values());
  return d2 + adjoint_lower_terms(pair, g.values());
}

double annihilation_residual(const DarbouxPair& pair, int j) {
  require_regular(pair);
  const WaveFunction& u = j == 1 ? pair.u1 : pair.u2;
  const double e = u.energy();
  const Samples d = first_derivative(u.values(), pair.grid.spacing());
  double top = 0.0, scale = 0.0;
  for (Index i = 0; i < u.values().size(); ++i) {
    const double t0 = (pair.v0_samples[i] - e) * u[i];
    const double t1 = pair.coeff_p[i] * d[i];
    const double t2 = pair.coeff_q[i] * u[i];
    top = std::max(top, std::abs(t0 + t1 + t2));
    scale = std::max(scale, std::abs(t0) + std::abs(t1) + std::abs(t2));
  }
  return scale > 0.0 ? top / scale : 0.0;
}

KernelFunctions kernel_functions(const DarbouxPair& pair) {
  require_regular(pair);
  WaveFunction v1(pair.grid, pair.u2.values().cwiseQuotient(pair.w.values), pair.alpha1);
  WaveFunction v2(pair.grid, pair.u1.values().cwiseQuotient(pair.w.values), pair.alpha2);
  v1.classify_asymptotics();
  v2.classify_asymptotics();
  const bool s1 = v1.asym_left() == Asymptote::decaying && v1.asym_right() == Asymptote::decaying;
  const bool s2 = v2.asym_left() == Asymptote::decaying && v2.asym_right() == Asymptote::decaying;
  return {std::move(v1), std::move(v2), s1, s2};
}

PoledSamples factorized_v2(const DarbouxPair& pair) {
  const Grid& grid = pair.grid;
  const double h = grid.spacing();
  const double a1 = pair.alpha1, a2 = pair.alpha2;
  const Samples& v0 = pair.v0_samples;
  const Samples& u1 = pair.u1.values();
  const Samples& u2 = pair.u2.values();
  const Samples du1 = first_derivative(u1, h);
  const Samples du2 = first_derivative(u2, h);
  const Samples dv0 = first_derivative(v0, h);

  // First step: l = u1'/u1 and V1 = V0 - 2 l'. Second step: v = u2' - l u2,
  // the image of u2, and V2 = V1 - 2 (log v)''. Second and third derivatives
  // of u1, u2 come from the Schroedinger equation.
  Samples v(grid.size()), dv(grid.size()), d2v(grid.size()), v1(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double l = du1[i] / u1[i];
    const double dl = v0[i] - a1 - l * l;
    const double d2l = dv0[i] - 2.0 * l * dl;
    const double d2u2 = (v0[i] - a2) * u2[i];
    const double d3u2 = dv0[i] * u2[i] + (v0[i] - a2) * du2[i];
    v1[i] = v0[i] - 2.0 * dl;
    v[i] = du2[i] - l * u2[i];
    dv[i] = d2u2 - dl * u2[i] - l * du2[i];
    d2v[i] = d3u2 - d2l * u2[i] - 2.0 * dl * du2[i] - l * d2u2;
  }
  auto zeros = zero_crossings(grid, u1);
  for (double z : zero_crossings(grid, v)) {
    // v changes sign through the poles of l as well; keep only its own zeros.
    if (std::none_of(zeros.begin(), zeros.end(), [&](double p) { return std::abs(p - z) <= 2.0 * h; })) {
      zeros.push_back(z);
    }
  }
  for (Index i = 0; i < grid.size(); ++i) {
    if (u1[i] == 0.0) v[i] = 0.0;
  }
  return log_transform(grid, v1, v, dv, d2v, std::move(zeros));
}

void write_potential_csv(const std::filesystem::path& path, const Grid& grid, const PoledSamples& v) {
  if (v.regular()) {
    write_potential_csv(path, grid, v.values);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "x,V,is_pole\n";
  for (Index i = 0; i < grid.size(); ++i) {
    const bool pole = v.is_pole[static_cast<std::size_t>(i)];
    out << csv::format(grid.x(i)) << ',' << csv::format(pole ? 0.0 : v.values[i]) << ',' << (pole ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace forge
