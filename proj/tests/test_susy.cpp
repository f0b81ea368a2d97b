#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>

using namespace forge;

namespace {

SpectralOutcome predict(const DarbouxPair& pair) {
  const TransformSpec spec{0, pair.alpha1, pair.alpha2, {}, {}};
  return predict_outcome(spec, pair.u1, pair.u2, fixture::oscillator_spectrum());
}

const Spectrum& krein_h2() {
  static const Spectrum s = partner_spectrum(fixture::krein(), 9);
  return s;
}

const Spectrum& case_a_h2() {
  static const Spectrum s = partner_spectrum(fixture::case_a(), 9);
  return s;
}

}  // namespace

TEST_CASE("outcome prediction covers the six cases") {
  const auto a = predict(fixture::case_a());
  CHECK(a.label == OutcomeCase::A_two_created);
  CHECK(a.deleted.empty());
  REQUIRE(a.created.size() == 2);
  CHECK(a.created[0] == 1.5);
  CHECK(a.created[1] == 2.5);

  const auto f = predict(fixture::krein());
  CHECK(f.label == OutcomeCase::F_krein_double_delete);
  REQUIRE(f.deleted.size() == 2);
  CHECK(f.deleted[0] == doctest::Approx(1.0));
  CHECK(f.deleted[1] == doctest::Approx(3.0));
  CHECK(f.created.empty());

  const auto e = predict(fixture::make_pair(1.0, Selector::eigenstate(), 2.5, Selector::pure_left()));
  CHECK(e.label == OutcomeCase::E_delete_only);
  CHECK(e.deleted.size() == 1);
  CHECK(e.created.empty());

  CHECK(predict(fixture::make_pair(1.5, Selector::target(2), 2.5, Selector::pure_right())).label ==
        OutcomeCase::B_one_created);
  CHECK(predict(fixture::make_pair(1.5, Selector::target(2), 3.0, Selector::eigenstate())).label ==
        OutcomeCase::C_delete_upper_create_lower);
  CHECK(predict(fixture::make_pair(1.0, Selector::eigenstate(), 2.5, Selector::target(1))).label ==
        OutcomeCase::D_delete_lower_create_upper);
  CHECK(predict(fixture::make_pair(1.5, Selector::pure_left(), 2.5, Selector::target(1))).label ==
        OutcomeCase::unknown);
}

TEST_CASE("partner spectra match the predicted level sets") {
  const auto& h0 = fixture::oscillator_spectrum();
  const auto krein = verify_outcome(predict(fixture::krein()), h0, krein_h2());
  CHECK(krein.passed());
  CHECK(krein.observed[0] == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(krein.max_deviation < 1e-6);

  const auto a = verify_outcome(predict(fixture::case_a()), h0, case_a_h2());
  CHECK(a.passed());
  const std::vector<double> expected{1, 1.5, 2.5, 3, 5};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(a.observed[i] - expected[i]) < 1e-5);

  const auto d_pair = fixture::make_pair(1.0, Selector::eigenstate(), 2.5, Selector::target(1));
  const auto d = verify_outcome(predict(d_pair), h0, partner_spectrum(d_pair, 5));
  CHECK(d.passed());
  CHECK(d.observed[0] == doctest::Approx(2.5).epsilon(1e-6));

  // A wrong prediction is reported, not hidden.
  SpectralOutcome wrong = predict(fixture::krein());
  wrong.deleted.pop_back();
  CHECK_FALSE(verify_outcome(wrong, h0, krein_h2()).passed());
}

TEST_CASE("intertwining") {
  const auto& h0 = fixture::oscillator_spectrum();
  const auto& krein = fixture::krein();
  CHECK(intertwining_residual(krein, {eigenfunction(h0, 2)}) < 1e-4);
  CHECK_THROWS_AS(intertwining_residual(krein, {krein.u1}), std::invalid_argument);
  CHECK(intertwining_residual(krein, {krein.u1, eigenfunction(h0, 3)}) < 1e-4);
  CHECK(intertwining_residual(fixture::case_a(), {eigenfunction(h0, 0)}) < 1e-4);
  const auto tests = intertwining_test_set(fixture::oscillator_samples(), h0, 6, {2.2}, fixture::grid());
  CHECK(tests.size() == 7);
  CHECK(intertwining_residual(krein, tests) < 1e-4);
}

TEST_CASE("factorization of the superalgebra") {
  const auto& pair = fixture::krein();
  const auto& h0 = fixture::oscillator_spectrum();
  const auto& psi2 = eigenfunction(h0, 2);
  const Samples llpsi = apply_L_adjoint(pair, apply_L(pair, psi2));
  CHECK(fixture::max_abs(llpsi - 8.0 * psi2.values()) / fixture::max_abs(psi2.values()) < 1e-4);
  const Samples zero = apply_L_adjoint(pair, apply_L(pair, eigenfunction(h0, 0)));
  CHECK(fixture::max_abs(zero) < 1e-6);

  const auto report = factorization_residual(pair, h0, krein_h2(), 6);
  CHECK(report.test_set_size == 12);
  CHECK(report.factorization_residual_l_adj_l < 1e-4);
  CHECK(report.factorization_residual_l_l_adj < 1e-4);

  const auto& a = fixture::case_a();
  const auto ra = factorization_residual(a, h0, case_a_h2(), 6);
  CHECK(ra.factorization_residual_l_adj_l < 1e-4);
  CHECK(ra.factorization_residual_l_l_adj < 1e-4);
}

TEST_CASE("transformed eigenfunctions are square integrable") {
  const auto& pair = fixture::case_a();
  const auto& h0 = fixture::oscillator_spectrum();
  for (int n = 0; n <= 5; ++n) {
    CAPTURE(n);
    CHECK(asymptotic_class(apply_L(pair, eigenfunction(h0, n))) == AsymptoticClass::zero_both);
  }
}

TEST_CASE("completeness evidence") {
  const auto& g = fixture::grid();
  const auto& h0 = fixture::oscillator_spectrum();
  const auto& krein = fixture::krein();
  const auto basis = completeness_basis(krein, predict(krein), h0, 16);
  CHECK(basis.labels.front() == "phi_2");
  CHECK(basis.max_overlap < 1e-6);
  const auto r = reconstruction_residuals(basis, gaussian_probe(g, 0.0, 1.0), g);
  CHECK(r[11] < 1e-3);
  const Samples member = basis.functions.col(5);
  CHECK(reconstruction_residuals(basis, member, g)[15] < 1e-8);

  const auto& a = fixture::case_a();
  const auto ba = completeness_basis(a, predict(a), h0, 16);
  CHECK(ba.labels[1] == "v1");
  CHECK(ba.labels[2] == "v2");
  const auto ra = reconstruction_residuals(ba, gaussian_probe(g, 0.0, 1.0), g);
  for (int m = 4; m < 16; ++m) CHECK(ra[m] <= ra[m - 1] * (1 + 1e-12));
  CHECK(ra[15] < ra[3]);

  CHECK_THROWS_AS(completeness_basis(krein, predict(krein), h0, 40), std::runtime_error);
}

TEST_CASE("superhamiltonian degeneracy and integrability flags") {
  const auto& h0 = fixture::oscillator_spectrum();
  const auto& a = fixture::case_a();
  const auto deg = check_degeneracy(h0, case_a_h2(), predict(a), 11.0);
  CHECK(deg.passed);
  const auto ic = check_integrability(a, kernel_functions(a), h0, case_a_h2());
  CHECK(ic.mismatches == 0);
  CHECK(ic.observed_created.size() == 2);

  const auto& k = fixture::krein();
  const auto ik = check_integrability(k, kernel_functions(k), h0, krein_h2());
  CHECK(ik.u1_square_integrable);
  CHECK(ik.u2_square_integrable);
  CHECK(ik.mismatches == 0);
  CHECK(ik.observed_deleted.size() == 2);
  CHECK(check_degeneracy(h0, krein_h2(), predict(k), 11.0).passed);
}
