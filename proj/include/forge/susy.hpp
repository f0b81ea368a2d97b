#pragma once

#include "forge/darboux.hpp"
#include "forge/regularity.hpp"
#include "forge/spectrum.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace forge {

enum class OutcomeCase {
  A_two_created,
  B_one_created,
  C_delete_upper_create_lower,
  D_delete_lower_create_upper,
  E_delete_only,
  F_krein_double_delete,
  unknown
};
std::string_view to_string(OutcomeCase c);

struct SpectralOutcome {
  OutcomeCase label = OutcomeCase::unknown;
  std::vector<double> deleted;
  std::vector<double> created;
  /// The set declared complete for h2, e.g. "{v1, v2, L psi_n : n >= 0}".
  std::string basis_note;
};

/// Maps the placement of alpha1, alpha2 in gap k and the asymptotic classes
/// of u1, u2 to one of the six cases. Anything else is reported as unknown.
SpectralOutcome predict_outcome(const TransformSpec& spec, const WaveFunction& u1, const WaveFunction& u2,
                                const Spectrum& spectrum);

struct OutcomeComparison {
  std::vector<double> expected;
  std::vector<double> observed;
  double max_deviation = 0.0;
  /// Level indices whose deviation exceeds the tolerance.
  std::vector<int> unmatched;
  double tolerance = 0.0;
  bool passed() const { return unmatched.empty(); }
};

/// Levels 0..k_max of h2 (the tabulated V2 on the pair's grid).
Spectrum partner_spectrum(const DarbouxPair& pair, int k_max, const ShootingOptions& options = {});

/// Compares spectrum(h2) level by level with (spectrum(h0) \ deleted) u created.
/// Throws std::runtime_error if h0 does not reach high enough to predict
/// every level of h2.
OutcomeComparison verify_outcome(const SpectralOutcome& predicted, const Spectrum& h0, const Spectrum& h2,
                                 double tolerance = 1e-5);

/// Test functions for the intertwining check: eigenfunctions of h0 plus
/// left-decaying gap solutions at the given energies.
std::vector<WaveFunction> intertwining_test_set(const Samples& v0, const Spectrum& h0, int eigen_count,
                                                const std::vector<double>& gap_energies, const Grid& grid);

/// max over test functions f of ||h2(Lf) - E Lf|| / ||Lf|| (sup norms over the
/// interior 95% of the grid). Functions annihilated by L are skipped; throws
/// std::invalid_argument if all of them are.
double intertwining_residual(const DarbouxPair& pair, const std::vector<WaveFunction>& tests);

struct AlgebraReport {
  double intertwining_residual = 0.0;
  double factorization_residual_l_adj_l = 0.0;
  double factorization_residual_l_l_adj = 0.0;
  int test_set_size = 0;
  double annihilation_u1 = 0.0;
  double annihilation_u2 = 0.0;
};

/// L+L psi_n = (E_n - a1)(E_n - a2) psi_n on the first `count` levels of h0
/// and L L+ chi_n likewise on levels of h2.
AlgebraReport factorization_residual(const DarbouxPair& pair, const Spectrum& h0, const Spectrum& h2, int count);

/// Members of the declared complete set, ordered by energy and normalized.
struct CompletenessBasis {
  std::vector<double> energies;
  std::vector<std::string> labels;
  Eigen::MatrixXd functions;  // one column per member
  double max_overlap = 0.0;
};

/// phi_n = L psi_n for levels not deleted, plus v_j for created levels.
/// Throws std::runtime_error if the members fail orthogonality (1e-4).
CompletenessBasis completeness_basis(const DarbouxPair& pair, const SpectralOutcome& outcome, const Spectrum& h0,
                                     int size);

/// Gaussian exp(-(x - center)^2 / width^2).
Samples gaussian_probe(const Grid& grid, double center, double width);

/// ||g - P_M g|| / ||g|| for M = 1..basis size, where P_M projects onto the
/// span of the first M members (trapezoid inner product).
std::vector<double> reconstruction_residuals(const CompletenessBasis& basis, const Samples& probe, const Grid& grid);

/// Multiplicity of each energy of h0 and h2 up to `cap`, matched within `tol`.
struct DegeneracyReport {
  std::vector<double> energies;
  std::vector<int> multiplicity;
  std::vector<int> expected;
  bool passed = false;
};

/// Checks that created and deleted levels appear once in spectrum(h0) u
/// spectrum(h2) and every other level of h0 up to `cap` twice.
DegeneracyReport check_degeneracy(const Spectrum& h0, const Spectrum& h2, const SpectralOutcome& outcome, double cap,
                                  double tol = 1e-5);

/// Deletion and creation predicted from square integrability of u_j and v_j
/// compared with the levels actually missing from or added to spectrum(h2).
struct IntegrabilityCheck {
  bool u1_square_integrable = false;
  bool u2_square_integrable = false;
  bool v1_square_integrable = false;
  bool v2_square_integrable = false;
  std::vector<double> observed_deleted;
  std::vector<double> observed_created;
  int mismatches = 0;
};

IntegrabilityCheck check_integrability(const DarbouxPair& pair, const KernelFunctions& kernel, const Spectrum& h0,
                                       const Spectrum& h2, double tol = 1e-5);

/// max |V2 - V0| over the outer 5% of the grid.
double asymptotic_deviation(const DarbouxPair& pair);

}  // namespace forge
