#include "doctest.h"
#include "fixtures.hpp"

#include "forge/stencil.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace forge;

namespace {

double max_on(const Samples& f, const Grid& g, double x_limit, double skip = -1.0) {
  double worst = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    if (std::abs(x) <= x_limit && std::abs(x) > skip) worst = std::max(worst, std::abs(f[i]));
  }
  return worst;
}

// max |L+ v| relative to the largest term entering it.
double adjoint_annihilation(const DarbouxPair& pair, const WaveFunction& v) {
  const Samples out = apply_L_adjoint(pair, v);
  const Samples dv = first_derivative(v.values(), pair.grid.spacing());
  const Samples dp = 0.5 * (pair.v2.values - pair.v0_samples);
  double scale = 0.0;
  for (Index i = 0; i < out.size(); ++i) {
    scale = std::max(scale, std::abs((pair.v2.values[i] - v.energy()) * v[i]) + std::abs(pair.coeff_p[i] * dv[i]) +
                                std::abs((pair.coeff_q[i] - dp[i]) * v[i]));
  }
  return fixture::max_abs(out) / scale;
}

}  // namespace

TEST_CASE("first-order transforms of the oscillator") {
  const auto& g = fixture::grid();
  const auto& sp = fixture::oscillator_spectrum();
  const auto& v0 = fixture::oscillator();

  const auto ground = first_order_transform(v0, eigenfunction(sp, 0));
  CHECK(ground.regular());
  CHECK(max_on(ground.values - (fixture::oscillator_samples().array() + 2.0).matrix(), g, 6.0) < 1e-6);

  const auto excited = first_order_transform(v0, eigenfunction(sp, 1));
  REQUIRE(excited.poles.size() == 1);
  CHECK(std::abs(excited.poles[0]) < g.spacing());
  CHECK(excited.is_pole[static_cast<std::size_t>(g.nearest(0.0))]);
  Samples expected(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    expected[i] = x == 0.0 ? 0.0 : x * x + 2.0 + 2.0 / (x * x);
  }
  CHECK(max_on(excited.values - expected, g, 6.0, 0.1) < 1e-5);

  const auto u = integrate(fixture::oscillator_samples(), 1.5, g, Side::left);
  REQUIRE(u.node_count() == 1);
  const auto gap = first_order_transform(v0, u);
  REQUIRE(gap.poles.size() == 1);
  CHECK(std::abs(gap.poles[0] - node_locations(u)[0]) <= g.spacing());
}

TEST_CASE("Krein pair gives the shifted oscillator") {
  const auto& pair = fixture::krein();
  const auto& g = pair.grid;
  CHECK(pair.regular());
  CHECK(pair.chain_class == ChainClass::completely_reducible);
  CHECK(pair.v1.regular());
  const Samples dev = pair.v2.values - (fixture::oscillator_samples().array() + 4.0).matrix();
  CHECK(max_on(dev, g, 6.0) < 1e-6);
  REQUIRE(pair.v2_potential.has_value());
  CHECK((*pair.v2_potential)(1.0) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("mid-gap pair is regular with a singular intermediate potential") {
  const auto& pair = fixture::case_a();
  CHECK(pair.regular());
  CHECK(pair.chain_class == ChainClass::irreducible_singular);
  CHECK((pair.v2.values.array().isFinite()).all());
  const auto zeros = node_locations(pair.u1);
  REQUIRE(pair.v1.poles.size() == zeros.size());
  for (std::size_t i = 0; i < zeros.size(); ++i) CHECK(std::abs(pair.v1.poles[i] - zeros[i]) <= pair.grid.spacing());
}

TEST_CASE("degenerate and mismatched inputs are rejected") {
  const auto& sp = fixture::oscillator_spectrum();
  const auto& v0 = fixture::oscillator();
  const auto psi0 = eigenfunction(sp, 0);
  CHECK_THROWS_AS(second_order_transform(v0, psi0, psi0), std::invalid_argument);
  CHECK_THROWS_AS(second_order_transform(v0, eigenfunction(sp, 1), psi0), std::invalid_argument);
  const Grid other(-10, 10, 2001);
  const auto coarse = integrate(other.points().cwiseAbs2(), 3.5, other, Side::left);
  CHECK_THROWS_AS(second_order_transform(v0, psi0, coarse), std::invalid_argument);
}

TEST_CASE("L maps psi2 onto the ground state of x^2 + 4") {
  const auto& pair = fixture::krein();
  const auto phi = apply_L(pair, eigenfunction(fixture::oscillator_spectrum(), 2));
  CHECK(phi.energy() == doctest::Approx(5.0));
  CHECK(schrodinger_residual(pair.v2.values, phi) < 1e-4);
  CHECK(phi.node_count() == 0);
  const auto& g = pair.grid;
  const double scale = phi[g.nearest(0.0)];
  for (double x : {-3.0, -1.0, 2.0, 4.0}) {
    CHECK(phi[g.nearest(x)] / scale == doctest::Approx(std::exp(-x * x / 2)).epsilon(1e-6));
  }
}

TEST_CASE("L annihilates its transformation functions") {
  for (const auto* pair : {&fixture::krein(), &fixture::case_a()}) {
    CHECK(annihilation_residual(*pair, 1) < 1e-8);
    CHECK(annihilation_residual(*pair, 2) < 1e-8);
  }
}

TEST_CASE("kernel of the adjoint") {
  const auto krein = kernel_functions(fixture::krein());
  CHECK_FALSE(krein.v1_square_integrable);
  CHECK_FALSE(krein.v2_square_integrable);

  const auto& pair = fixture::case_a();
  const auto k = kernel_functions(pair);
  CHECK(k.v1_square_integrable);
  CHECK(k.v2_square_integrable);
  CHECK(k.v1.energy() == pair.alpha1);
  CHECK(k.v2.energy() == pair.alpha2);
  CHECK(adjoint_annihilation(pair, k.v1) < 1e-6);
  CHECK(adjoint_annihilation(pair, k.v2) < 1e-6);
  // Sample-wise ratios.
  const Index mid = pair.grid.nearest(0.3);
  CHECK(k.v1[mid] == doctest::Approx(pair.u2[mid] / pair.w.values[mid]));
  // The eigen-residual of v_j carries the noise of differentiating W twice.
  CHECK(schrodinger_residual(pair.v2.values, k.v1) < 1e-4);
  CHECK(schrodinger_residual(pair.v2.values, k.v2) < 1e-4);

  const auto one_sided = fixture::make_pair(1.5, Selector::target(2), 2.5, Selector::pure_left());
  const auto kb = kernel_functions(one_sided);
  CHECK(kb.v1_square_integrable);
  CHECK_FALSE(kb.v2_square_integrable);
}

TEST_CASE("factorized chain reproduces V2 away from the poles of V1") {
  const auto& pair = fixture::case_a();
  const auto f = factorized_v2(pair);
  CHECK(f.poles.size() >= pair.v1.poles.size());
  const Index band = pair.grid.edge_band(0.05);
  double worst = 0.0;
  for (Index i = band; i < pair.grid.size() - band; ++i) {
    const double x = pair.grid.x(i);
    bool near = false;
    for (double p : f.poles) near = near || std::abs(x - p) < 0.05;
    if (!near) worst = std::max(worst, std::abs(f.values[i] - pair.v2.values[i]));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("singular pair keeps its poles as data") {
  const auto pair = fixture::make_pair(1.5, Selector::target(1), 2.5, Selector::target(2));
  CHECK_FALSE(pair.regular());
  CHECK_FALSE(pair.v2_potential.has_value());
  CHECK(pair.v2.poles.size() == pair.w.zero_crossings.size());
  CHECK((pair.v2.values.array().isFinite()).all());
  CHECK_THROWS_AS(apply_L(pair, eigenfunction(fixture::oscillator_spectrum(), 0)), std::domain_error);
  CHECK_THROWS_AS(kernel_functions(pair), std::domain_error);

  const auto path = std::filesystem::temp_directory_path() / "forge_test_singular_v2.csv";
  write_potential_csv(path, pair.grid, pair.v2);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,V,is_pole");
  CHECK_THROWS(read_potential_csv(path));
  std::filesystem::remove(path);
}

TEST_CASE("V2 export can be re-ingested as a seed") {
  const auto& pair = fixture::krein();
  const auto path = std::filesystem::temp_directory_path() / "forge_test_krein_v2.csv";
  write_potential_csv(path, pair.grid, pair.v2);
  const auto v2 = read_potential_csv(path);
  for (Index i = 0; i < pair.grid.size(); i += 997) CHECK(v2(pair.grid.x(i)) == pair.v2.values[i]);
  std::filesystem::remove(path);
}
