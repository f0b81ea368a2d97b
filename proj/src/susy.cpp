#include "forge/susy.hpp"

#include "forge/csv.hpp"
#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace forge {

std::string_view to_string(OutcomeCase c) {
  switch (c) {
    case OutcomeCase::A_two_created: return "A_two_created";
    case OutcomeCase::B_one_created: return "B_one_created";
    case OutcomeCase::C_delete_upper_create_lower: return "C_delete_upper_create_lower";
    case OutcomeCase::D_delete_lower_create_upper: return "D_delete_lower_create_upper";
    case OutcomeCase::E_delete_only: return "E_delete_only";
    case OutcomeCase::F_krein_double_delete: return "F_krein_double_delete";
    case OutcomeCase::unknown: break;
  }
  return "unknown";
}

namespace {

std::optional<AsymptoticClass> try_class(const WaveFunction& u) {
  try {
    return asymptotic_class(u);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

bool one_sided(std::optional<AsymptoticClass> c) {
  return c == AsymptoticClass::zero_left || c == AsymptoticClass::zero_right;
}

bool contains(const std::vector<double>& set, double e, double tol) {
  return std::any_of(set.begin(), set.end(), [&](double s) { return std::abs(s - e) <= tol; });
}

// Indices excluding the outer 5% of the grid.
std::pair<Index, Index> interior(const Grid& grid) {
  const Index band = grid.edge_band(0.05);
  return {band, grid.size() - band};
}

double interior_max(const Samples& f, const Grid& grid) {
  const auto [a, b] = interior(grid);
  return f.segment(a, b - a).cwiseAbs().maxCoeff();
}

}  // namespace

SpectralOutcome predict_outcome(const TransformSpec& spec, const WaveFunction& u1, const WaveFunction& u2,
                                const Spectrum& spectrum) {
  SpectralOutcome out;
  const int k = spec.k;
  if (k < 0 || k + 1 >= spectrum.size()) return out;
  const double lower = spectrum.levels[static_cast<std::size_t>(k)];
  const double upper = spectrum.levels[static_cast<std::size_t>(k + 1)];
  const double a1 = u1.energy(), a2 = u2.energy();
  const bool at_lower = std::abs(a1 - lower) <= kLevelMatch;
  const bool at_upper = std::abs(a2 - upper) <= kLevelMatch;
  const bool mid1 = !at_lower && a1 > lower && a1 < upper;
  const bool mid2 = !at_upper && a2 > a1 && a2 < upper;
  const auto c1 = try_class(u1);
  const auto c2 = try_class(u2);
  const bool l2_1 = c1 == AsymptoticClass::zero_both;
  const bool l2_2 = c2 == AsymptoticClass::zero_both;
  const bool grow1 = c1 == AsymptoticClass::growing_both;
  const bool grow2 = c2 == AsymptoticClass::growing_both;

  const std::string ks = std::to_string(k), k1s = std::to_string(k + 1);
  if (at_lower && at_upper && l2_1 && l2_2) {
    out = {OutcomeCase::F_krein_double_delete, {lower, upper}, {}, "{L psi_n : n >= 0, n != " + ks + ", " + k1s + "}"};
  } else if (at_lower && l2_1 && mid2 && grow2) {
    out = {OutcomeCase::D_delete_lower_create_upper, {lower}, {a2}, "{v2, L psi_n : n >= 0, n != " + ks + "}"};
  } else if (at_lower && l2_1 && mid2 && one_sided(c2)) {
    out = {OutcomeCase::E_delete_only, {lower}, {}, "{L psi_n : n >= 0, n != " + ks + "}"};
  } else if (mid1 && grow1 && at_upper && l2_2) {
    out = {OutcomeCase::C_delete_upper_create_lower, {upper}, {a1}, "{v1, L psi_n : n >= 0, n != " + k1s + "}"};
  } else if (mid1 && mid2 && grow1 && grow2) {
    out = {OutcomeCase::A_two_created, {}, {a1, a2}, "{v1, v2, L psi_n : n >= 0}"};
  } else if (mid1 && mid2 && grow1 && one_sided(c2)) {
    out = {OutcomeCase::B_one_created, {}, {a1}, "{v1, L psi_n : n >= 0}"};
  }
  return out;
}

Spectrum partner_spectrum(const DarbouxPair& pair, int k_max, const ShootingOptions& options) {
  if (!pair.v2_potential) throw std::domain_error("partner spectrum needs a regular pair");
  return compute_spectrum(pair.v2.values, k_max, pair.grid, options);
}

OutcomeComparison verify_outcome(const SpectralOutcome& predicted, const Spectrum& h0, const Spectrum& h2,
                                 double tolerance) {
  OutcomeComparison cmp;
  cmp.tolerance = tolerance;
  cmp.observed = h2.levels;
  for (double e : h0.levels) {
    if (!contains(predicted.deleted, e, kLevelMatch)) cmp.expected.push_back(e);
  }
  const double top = h0.levels.empty() ? 0.0 : h0.levels.back();
  cmp.expected.insert(cmp.expected.end(), predicted.created.begin(), predicted.created.end());
  std::sort(cmp.expected.begin(), cmp.expected.end());
  if (cmp.expected.size() < cmp.observed.size() || (!cmp.observed.empty() && cmp.observed.back() > top + tolerance)) {
    throw std::runtime_error("spectrum of h0 does not reach the top computed level of h2");
  }
  cmp.expected.resize(cmp.observed.size());
  for (std::size_t i = 0; i < cmp.observed.size(); ++i) {
    const double d = std::abs(cmp.observed[i] - cmp.expected[i]);
    cmp.max_deviation = std::max(cmp.max_deviation, d);
    if (!(d <= tolerance)) cmp.unmatched.push_back(static_cast<int>(i));
  }
  return cmp;
}

std::vector<WaveFunction> intertwining_test_set(const Samples& v0, const Spectrum& h0, int eigen_count,
                                                const std::vector<double>& gap_energies, const Grid& grid) {
  std::vector<WaveFunction> tests;
  for (int n = 0; n < eigen_count; ++n) tests.push_back(eigenfunction(h0, n));
  for (double e : gap_energies) tests.push_back(integrate(v0, e, grid, Side::left));
  return tests;
}

double intertwining_residual(const DarbouxPair& pair, const std::vector<WaveFunction>& tests) {
  const Grid& grid = pair.grid;
  const double h = grid.spacing();
  double worst = 0.0;
  int used = 0;
  for (const auto& f : tests) {
    const double e = f.energy();
    const Samples df = first_derivative(f.values(), h);
    double scale = 0.0;
    for (Index i = 0; i < grid.size(); ++i) {
      scale = std::max(scale, std::abs((pair.v0_samples[i] - e) * f[i]) + std::abs(pair.coeff_p[i] * df[i]) +
                                  std::abs(pair.coeff_q[i] * f[i]));
    }
    const Samples lf = apply_L(pair, f).values();
    if (!(lf.cwiseAbs().maxCoeff() > 1e-8 * scale)) continue;  // f lies in Ker L
    worst = std::max(worst, schrodinger_residual(pair.v2.values, lf, e, grid));
    ++used;
  }
  if (used == 0) throw std::invalid_argument("every test function is annihilated by L");
  return worst;
}

AlgebraReport factorization_residual(const DarbouxPair& pair, const Spectrum& h0, const Spectrum& h2, int count) {
  AlgebraReport report;
  const Grid& grid = pair.grid;
  const double a1 = pair.alpha1, a2 = pair.alpha2;
  const int n0 = std::min<int>(count, static_cast<int>(h0.size()));
  const int n2 = std::min<int>(count, static_cast<int>(h2.size()));
  for (int n = 0; n < n0; ++n) {
    const auto& psi = eigenfunction(h0, n);
    const double e = psi.energy();
    const WaveFunction phi = apply_L(pair, psi);
    const Samples r = apply_L_adjoint(pair, phi) - (e - a1) * (e - a2) * psi.values();
    report.factorization_residual_l_adj_l =
        std::max(report.factorization_residual_l_adj_l, interior_max(r, grid) / interior_max(psi.values(), grid));
  }
  for (int n = 0; n < n2; ++n) {
    const auto& chi = eigenfunction(h2, n);
    const double e = chi.energy();
    const WaveFunction g(grid, apply_L_adjoint(pair, chi), e);
    const Samples r = apply_L(pair, g).values() - (e - a1) * (e - a2) * chi.values();
    report.factorization_residual_l_l_adj =
        std::max(report.factorization_residual_l_l_adj, interior_max(r, grid) / interior_max(chi.values(), grid));
  }
  report.test_set_size = n0 + n2;
  report.annihilation_u1 = annihilation_residual(pair, 1);
  report.annihilation_u2 = annihilation_residual(pair, 2);
  return report;
}

namespace {

Samples trapezoid_weights(const Grid& grid) {
  Samples w = Samples::Constant(grid.size(), grid.spacing());
  w[0] *= 0.5;
  w[grid.size() - 1] *= 0.5;
  return w;
}

void normalize_column(Samples& f, const Samples& weights) {
  const double norm = std::sqrt(f.cwiseProduct(f).dot(weights));
  if (!(norm > 0.0)) throw std::runtime_error("basis member has zero norm");
  f /= norm;
}

}  // namespace

CompletenessBasis completeness_basis(const DarbouxPair& pair, const SpectralOutcome& outcome, const Spectrum& h0,
                                     int size) {
  struct Member {
    double energy;
    std::string label;
    Samples values;
  };
  const Samples weights = trapezoid_weights(pair.grid);
  std::vector<Member> members;
  for (int n = 0; n < h0.size(); ++n) {
    const double e = h0.levels[static_cast<std::size_t>(n)];
    if (contains(outcome.deleted, e, kLevelMatch)) continue;
    members.push_back({e, "phi_" + std::to_string(n), apply_L(pair, eigenfunction(h0, n)).values()});
  }
  if (contains(outcome.created, pair.alpha1, kLevelMatch) || contains(outcome.created, pair.alpha2, kLevelMatch)) {
    const auto kernel = kernel_functions(pair);
    if (contains(outcome.created, pair.alpha1, kLevelMatch)) members.push_back({pair.alpha1, "v1", kernel.v1.values()});
    if (contains(outcome.created, pair.alpha2, kLevelMatch)) members.push_back({pair.alpha2, "v2", kernel.v2.values()});
  }
  std::stable_sort(members.begin(), members.end(), [](const Member& x, const Member& y) { return x.energy < y.energy; });
  if (static_cast<int>(members.size()) < size) {
    throw std::runtime_error("spectrum of h0 too short for a basis of " + std::to_string(size) + " members");
  }

  CompletenessBasis basis;
  basis.functions.resize(pair.grid.size(), size);
  for (int j = 0; j < size; ++j) {
    Samples f = members[static_cast<std::size_t>(j)].values;
    normalize_column(f, weights);
    basis.functions.col(j) = f;
    basis.energies.push_back(members[static_cast<std::size_t>(j)].energy);
    basis.labels.push_back(members[static_cast<std::size_t>(j)].label);
  }
  const Eigen::MatrixXd gram = basis.functions.transpose() * weights.asDiagonal() * basis.functions;
  basis.max_overlap = (gram - Eigen::MatrixXd::Identity(size, size)).cwiseAbs().maxCoeff();
  if (basis.max_overlap > 1e-4) {
    throw std::runtime_error("declared basis is not orthonormal (max overlap " + csv::format(basis.max_overlap) + ")");
  }
  return basis;
}

Samples gaussian_probe(const Grid& grid, double center, double width) {
  const Samples x = grid.points();
  return (-((x.array() - center) / width).square()).exp().matrix();
}

std::vector<double> reconstruction_residuals(const CompletenessBasis& basis, const Samples& probe, const Grid& grid) {
  const Samples root = trapezoid_weights(grid).cwiseSqrt();
  const Eigen::MatrixXd b = root.asDiagonal() * basis.functions;
  const Samples g = root.cwiseProduct(probe);
  const Index m = b.cols();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(b.rows(), m);
  const Samples coeff = q.transpose() * g;
  const double norm = g.norm();
  std::vector<double> out;
  for (Index k = 1; k <= m; ++k) {
    out.push_back((g - q.leftCols(k) * coeff.head(k)).norm() / norm);
  }
  return out;
}

DegeneracyReport check_degeneracy(const Spectrum& h0, const Spectrum& h2, const SpectralOutcome& outcome, double cap,
                                  double tol) {
  DegeneracyReport report;
  std::vector<double> all;
  for (double e : h0.levels) {
    if (e <= cap + tol) all.push_back(e);
  }
  for (double e : h2.levels) {
    if (e <= cap + tol) all.push_back(e);
  }
  std::sort(all.begin(), all.end());
  for (double e : all) {
    if (!report.energies.empty() && std::abs(e - report.energies.back()) <= tol) {
      ++report.multiplicity.back();
    } else {
      report.energies.push_back(e);
      report.multiplicity.push_back(1);
    }
  }
  report.passed = !report.energies.empty();
  for (std::size_t i = 0; i < report.energies.size(); ++i) {
    const double e = report.energies[i];
    const bool single = contains(outcome.created, e, tol) || contains(outcome.deleted, e, tol);
    report.expected.push_back(single ? 1 : 2);
    if (report.multiplicity[i] != report.expected.back()) report.passed = false;
  }
  return report;
}

namespace {

bool square_integrable(const WaveFunction& u) { return try_class(u) == AsymptoticClass::zero_both; }

}  // namespace

IntegrabilityCheck check_integrability(const DarbouxPair& pair, const KernelFunctions& kernel, const Spectrum& h0,
                                       const Spectrum& h2, double tol) {
  IntegrabilityCheck check;
  check.u1_square_integrable = square_integrable(pair.u1);
  check.u2_square_integrable = square_integrable(pair.u2);
  check.v1_square_integrable = kernel.v1_square_integrable;
  check.v2_square_integrable = kernel.v2_square_integrable;
  if (h0.levels.empty() || h2.levels.empty()) throw std::invalid_argument("empty spectrum");
  const double cap = std::min(h0.levels.back(), h2.levels.back());
  for (double e : h0.levels) {
    if (e <= cap && !contains(h2.levels, e, tol)) check.observed_deleted.push_back(e);
  }
  for (double e : h2.levels) {
    if (e <= cap && !contains(h0.levels, e, tol)) check.observed_created.push_back(e);
  }
  std::vector<double> predicted_deleted, predicted_created;
  if (check.u1_square_integrable) predicted_deleted.push_back(pair.alpha1);
  if (check.u2_square_integrable) predicted_deleted.push_back(pair.alpha2);
  if (check.v1_square_integrable) predicted_created.push_back(pair.alpha1);
  if (check.v2_square_integrable) predicted_created.push_back(pair.alpha2);
  const auto count_missing = [&](const std::vector<double>& from, const std::vector<double>& in) {
    return static_cast<int>(std::count_if(from.begin(), from.end(), [&](double e) { return !contains(in, e, tol); }));
  };
  check.mismatches = count_missing(predicted_deleted, check.observed_deleted) +
                     count_missing(check.observed_deleted, predicted_deleted) +
                     count_missing(predicted_created, check.observed_created) +
                     count_missing(check.observed_created, predicted_created);
  return check;
}

double asymptotic_deviation(const DarbouxPair& pair) {
  const Index band = pair.grid.edge_band(0.05);
  const Samples d = (pair.v2.values - pair.v0_samples).cwiseAbs();
  return std::max(d.head(band).maxCoeff(), d.tail(band).maxCoeff());
}

}  // namespace forge
