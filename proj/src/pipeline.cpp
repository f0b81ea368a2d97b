#include "forge/pipeline.hpp"

#include "forge/csv.hpp"
#include "forge/susy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

namespace forge {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

// Non-finite values have no JSON representation.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["potential"] = {{"name", c.potential_name},
                    {"params", c.potential_params},
                    {"file", c.potential_file ? c.potential_file->generic_string() : ""}};
  j["grid"] = {{"x_min", c.x_min}, {"x_max", c.x_max}, {"n", c.grid_n}};
  j["transform"] = {{"k", c.k},
                    {"alpha1", c.alpha1},
                    {"alpha2", c.alpha2},
                    {"u1", to_string(c.u1)},
                    {"u2", to_string(c.u2)}};
  j["k_max"] = c.k_max;
  const auto& t = c.tol;
  j["tolerances"] = {{"energy", t.energy},
                     {"mismatch", t.mismatch},
                     {"spectrum_match", t.spectrum_match},
                     {"zero_free", t.zero_free},
                     {"w_identity", t.w_identity},
                     {"intertwining", t.intertwining},
                     {"factorization", t.factorization},
                     {"annihilation", t.annihilation},
                     {"kernel_residual", t.kernel_residual},
                     {"asymptotic", t.asymptotic},
                     {"completeness", t.completeness}};
  return j;
}

ordered_json wavefunction_json(const WaveFunction& u) {
  ordered_json j{{"energy", u.energy()}, {"nodes", u.node_count()}};
  try {
    j["asymptotic_class"] = to_string(asymptotic_class(u));
  } catch (const std::runtime_error&) {
    j["asymptotic_class"] = "undetermined";
  }
  return j;
}

class Checks {
 public:
  // Records value < threshold (or value > threshold when `above`).
  void add(const std::string& name, double value, double threshold, bool gating, bool above = false) {
    const bool ok = std::isfinite(value) && (above ? value > threshold : value < threshold);
    push(name, number(value), number(threshold), ok, gating);
  }
  void flag(const std::string& name, bool ok, bool gating) { push(name, ok, true, ok, gating); }
  void error(const std::string& name, const std::string& what, bool gating) {
    push(name, what, nullptr, false, gating);
  }
  bool passed() const { return passed_; }
  const ordered_json& json() const { return list_; }

 private:
  void push(const std::string& name, ordered_json value, ordered_json threshold, bool ok, bool gating) {
    list_.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"passed", ok}, {"gating", gating}});
    if (gating && !ok) passed_ = false;
  }
  ordered_json list_ = ordered_json::array();
  bool passed_ = true;
};

void write_report(const fs::path& dir, const ordered_json& report, std::vector<fs::path>& files) {
  const fs::path path = dir / "report.json";
  auto out = open_for_write(path);
  out << report.dump(2) << '\n';
  files.push_back(path);
}

// max |V2 - factorized V2| away from poles and the outer 5% of the grid.
double factorization_consistency(const DarbouxPair& pair) {
  const PoledSamples f = factorized_v2(pair);
  const Grid& grid = pair.grid;
  const Index band = grid.edge_band(0.05);
  double worst = 0.0;
  for (Index i = band; i < grid.size() - band; ++i) {
    const double x = grid.x(i);
    const bool near_pole = std::any_of(f.poles.begin(), f.poles.end(), [&](double p) { return std::abs(x - p) < 0.05; });
    if (near_pole || f.is_pole[static_cast<std::size_t>(i)] || pair.v2.is_pole[static_cast<std::size_t>(i)]) continue;
    worst = std::max(worst, std::abs(f.values[i] - pair.v2.values[i]));
  }
  return worst;
}

void verify_regular_pair(const RunConfig& cfg, const DarbouxPair& pair, const Spectrum& h0,
                         const SpectralOutcome& predicted, ordered_json& report, Checks& checks,
                         std::vector<fs::path>& files) {
  const auto& tol = cfg.tol;
  const Grid& grid = pair.grid;
  ShootingOptions shooting{tol.energy, tol.mismatch};

  const auto kernel = kernel_functions(pair);
  const double r1 = schrodinger_residual(pair.v2.values, kernel.v1);
  const double r2 = schrodinger_residual(pair.v2.values, kernel.v2);
  report["kernel"] = {{"v1", wavefunction_json(kernel.v1)},
                      {"v2", wavefunction_json(kernel.v2)},
                      {"v1_square_integrable", kernel.v1_square_integrable},
                      {"v2_square_integrable", kernel.v2_square_integrable},
                      {"v1_eigen_residual", number(r1)},
                      {"v2_eigen_residual", number(r2)}};
  checks.add("kernel_eigen_residual_v1", r1, tol.kernel_residual, false);
  checks.add("kernel_eigen_residual_v2", r2, tol.kernel_residual, false);

  const double asym = asymptotic_deviation(pair);
  report["darboux"]["asymptotic_deviation"] = number(asym);
  checks.add("asymptotic_reversion", asym, tol.asymptotic, false);

  const double fc = factorization_consistency(pair);
  report["darboux"]["factorized_v2_deviation"] = number(fc);
  checks.add("factorized_v2_consistency", fc, 1e-5, false);

  Spectrum h2;
  try {
    h2 = partner_spectrum(pair, cfg.k_max, shooting);
  } catch (const std::exception& e) {
    checks.error("spectrum_h2", e.what(), true);
    return;
  }
  report["spectrum_h2"] = h2.levels;
  write_spectrum_csv(cfg.output_dir / "spectrum_h2.csv", h2.levels);
  files.push_back(cfg.output_dir / "spectrum_h2.csv");

  try {
    const auto cmp = verify_outcome(predicted, h0, h2, tol.spectrum_match);
    report["verified_outcome"] = {{"expected", cmp.expected},
                                  {"observed", cmp.observed},
                                  {"max_deviation", number(cmp.max_deviation)},
                                  {"unmatched_levels", cmp.unmatched},
                                  {"passed", cmp.passed()}};
    checks.add("spectrum_match", cmp.max_deviation, tol.spectrum_match, true);
  } catch (const std::exception& e) {
    checks.error("spectrum_match", e.what(), true);
  }

  const int count = std::min<int>({6, static_cast<int>(h0.size()), static_cast<int>(h2.size())});
  const auto eigen_tests = intertwining_test_set(pair.v0_samples, h0, count, {}, grid);
  auto algebra = factorization_residual(pair, h0, h2, count);
  algebra.intertwining_residual = intertwining_residual(pair, eigen_tests);
  report["algebra"] = {{"intertwining_residual", number(algebra.intertwining_residual)},
                       {"factorization_residual_l_adj_l", number(algebra.factorization_residual_l_adj_l)},
                       {"factorization_residual_l_l_adj", number(algebra.factorization_residual_l_l_adj)},
                       {"test_set_size", algebra.test_set_size},
                       {"annihilation_u1", number(algebra.annihilation_u1)},
                       {"annihilation_u2", number(algebra.annihilation_u2)}};
  checks.add("intertwining", algebra.intertwining_residual, tol.intertwining, true);
  checks.add("factorization_l_adj_l", algebra.factorization_residual_l_adj_l, tol.factorization, true);
  checks.add("factorization_l_l_adj", algebra.factorization_residual_l_l_adj, tol.factorization, true);
  checks.add("annihilation_u1", algebra.annihilation_u1, tol.annihilation, true);
  checks.add("annihilation_u2", algebra.annihilation_u2, tol.annihilation, true);
  if (!cfg.gap_energies.empty()) {
    try {
      const auto gap_tests = intertwining_test_set(pair.v0_samples, h0, 0, cfg.gap_energies, grid);
      const double gap = intertwining_residual(pair, gap_tests);
      report["algebra"]["intertwining_residual_gap_solutions"] = number(gap);
      checks.add("intertwining_gap_solutions", gap, tol.intertwining, false);
    } catch (const std::exception& e) {
      checks.error("intertwining_gap_solutions", e.what(), false);
    }
  }

  const auto integrability = check_integrability(pair, kernel, h0, h2, tol.spectrum_match);
  report["integrability"] = {{"u1_square_integrable", integrability.u1_square_integrable},
                             {"u2_square_integrable", integrability.u2_square_integrable},
                             {"v1_square_integrable", integrability.v1_square_integrable},
                             {"v2_square_integrable", integrability.v2_square_integrable},
                             {"observed_deleted", integrability.observed_deleted},
                             {"observed_created", integrability.observed_created},
                             {"mismatches", integrability.mismatches}};
  checks.add("integrability_mismatches", integrability.mismatches, 1.0, true);

  const double cap = std::min(h0.levels.back(), h2.levels.back());
  const auto degeneracy = check_degeneracy(h0, h2, predicted, cap, tol.spectrum_match);
  report["degeneracy"] = {{"energy_cap", cap},
                          {"energies", degeneracy.energies},
                          {"multiplicity", degeneracy.multiplicity},
                          {"expected", degeneracy.expected},
                          {"passed", degeneracy.passed}};
  checks.flag("degeneracy", degeneracy.passed, true);

  try {
    const auto basis = completeness_basis(pair, predicted, h0, cfg.basis_max);
    ordered_json probes = ordered_json::array();
    const auto probe_entry = [&](double center, double width) {
      const auto r = reconstruction_residuals(basis, gaussian_probe(grid, center, width), grid);
      std::vector<double> tail(r.begin() + (cfg.basis_min - 1), r.end());
      bool monotone = true;
      for (std::size_t i = 1; i < tail.size(); ++i) monotone = monotone && tail[i] <= tail[i - 1] * (1.0 + 1e-12);
      return std::tuple{ordered_json{{"center", center}, {"width", width}, {"residuals", tail}, {"monotone", monotone}},
                        tail.back(), monotone};
    };
    const auto [primary, last, monotone] = probe_entry(cfg.probe_center, cfg.probe_width);
    for (double c : {-2.0, 0.0, 2.0}) {
      for (double w : {0.5, 1.0, 2.0}) probes.push_back(std::get<0>(probe_entry(c, w)));
    }
    report["completeness"] = {{"basis", basis.labels},
                              {"basis_energies", basis.energies},
                              {"max_overlap", number(basis.max_overlap)},
                              {"truncations", {cfg.basis_min, cfg.basis_max}},
                              {"primary_probe", primary},
                              {"probe_panel", probes}};
    checks.flag("completeness_monotone", monotone, true);
    checks.add("completeness_residual", last, tol.completeness, true);
  } catch (const std::exception& e) {
    checks.error("completeness", e.what(), true);
  }

  for (int n : cfg.phi_levels) {
    if (n >= h0.size() || std::any_of(predicted.deleted.begin(), predicted.deleted.end(),
                                      [&](double e) { return std::abs(e - h0.levels[static_cast<std::size_t>(n)]) <= kLevelMatch; })) {
      continue;
    }
    const fs::path path = cfg.output_dir / ("phi_" + std::to_string(n) + ".csv");
    write_samples_csv(path, grid, apply_L(pair, eigenfunction(h0, n)).values());
    files.push_back(path);
  }
}

}  // namespace

void write_samples_csv(const fs::path& path, const Grid& grid, const Samples& values) {
  auto out = open_for_write(path);
  out << "x,value\n";
  for (Index i = 0; i < grid.size(); ++i) out << csv::format(grid.x(i)) << ',' << csv::format(values[i]) << '\n';
}

void write_spectrum_csv(const fs::path& path, const std::vector<double>& levels) {
  auto out = open_for_write(path);
  out << "k,E\n";
  for (std::size_t k = 0; k < levels.size(); ++k) out << k << ',' << csv::format(levels[k]) << '\n';
}

std::vector<fs::path> emit_plot_data(const DarbouxPair& pair, const fs::path& outdir) {
  fs::create_directories(outdir);
  std::vector<fs::path> files;
  const Grid& grid = pair.grid;
  const auto samples = [&](const std::string& name, const Samples& values) {
    write_samples_csv(outdir / name, grid, values);
    files.push_back(outdir / name);
  };
  samples("V0.csv", pair.v0_samples);
  {
    auto out = open_for_write(outdir / "V1.csv");
    out << "x,value,is_pole\n";
    for (Index i = 0; i < grid.size(); ++i) {
      out << csv::format(grid.x(i)) << ',' << csv::format(pair.v1.values[i]) << ','
          << (pair.v1.is_pole[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
    }
    files.push_back(outdir / "V1.csv");
  }
  write_potential_csv(outdir / "V2.csv", grid, pair.v2);
  files.push_back(outdir / "V2.csv");
  samples("u1.csv", pair.u1.values());
  samples("u2.csv", pair.u2.values());
  samples("W.csv", pair.w.values);
  if (pair.regular()) {
    const auto kernel = kernel_functions(pair);
    samples("v1.csv", kernel.v1.values());
    samples("v2.csv", kernel.v2.values());
  }
  return files;
}

RunResult run_pipeline(const RunConfig& cfg) {
  RunResult result;
  auto& report = result.report;
  report["generated_at"] = timestamp();
  report["config"] = config_json(cfg);

  std::optional<Potential> loaded;
  try {
    loaded = cfg.make_potential();
  } catch (const std::exception& e) {
    result.exit_code = exit_config_error;
    report["status"] = "config_error";
    report["error"] = e.what();
    return result;
  }
  fs::create_directories(cfg.output_dir);

  const Potential& potential = *loaded;
  const auto& tol = cfg.tol;
  const Grid grid = cfg.make_grid();
  const Samples v0 = potential.sample(grid);
  std::optional<DarbouxPair> pair;
  std::optional<Spectrum> h0;
  TransformSpec spec;
  try {
    const auto cls = classify_potential(potential, grid);
    report["potential"] = {{"description", potential.describe()},
                           {"label", to_string(cls.label)},
                           {"moment_integral", number(cls.moment_integral)},
                           {"slope_integral", number(cls.slope_integral)},
                           {"curvature_integral", number(cls.curvature_integral)},
                           {"moment_converges", cls.moment_converges},
                           {"slope_converges", cls.slope_converges},
                           {"curvature_converges", cls.curvature_converges}};
    const int h0_levels = std::max(cfg.k_max + 2, cfg.basis_max + 1);
    h0 = compute_spectrum(v0, h0_levels, grid, ShootingOptions{tol.energy, tol.mismatch});
    report["spectrum_h0"] = h0->levels;
    write_spectrum_csv(cfg.output_dir / "spectrum_h0.csv", h0->levels);
    result.files.push_back(cfg.output_dir / "spectrum_h0.csv");

    spec = validate(TransformSpec{cfg.k, cfg.alpha1, cfg.alpha2, cfg.u1, cfg.u2}, *h0);
    auto u1 = construct_transformation_function(v0, spec.alpha1, spec.u1, spec.k, *h0, grid);
    auto u2 = construct_transformation_function(v0, spec.alpha2, spec.u2, spec.k + 1, *h0, grid);
    pair = second_order_transform(potential, u1, u2);
    const auto plots = emit_plot_data(*pair, cfg.output_dir);
    result.files.insert(result.files.end(), plots.begin(), plots.end());
  } catch (const std::exception& e) {
    result.exit_code = exit_construction_error;
    report["status"] = "construction_failed";
    report["error"] = e.what();
    write_report(cfg.output_dir, report, result.files);
    return result;
  }

  report["transform"] = {{"k", spec.k},
                         {"alpha1", spec.alpha1},
                         {"alpha2", spec.alpha2},
                         {"u1_selector", to_string(spec.u1)},
                         {"u2_selector", to_string(spec.u2)},
                         {"u1", wavefunction_json(pair->u1)},
                         {"u2", wavefunction_json(pair->u2)}};
  report["darboux"] = {{"chain_class", to_string(pair->chain_class)},
                       {"regular", pair->regular()},
                       {"v1_poles", pair->v1.poles},
                       {"v2_poles", pair->v2.poles}};

  Checks checks;
  const auto reg = verify_wronskian_regularity(*pair, *h0);
  report["regularity"] = {{"node_counts", {reg.n1, reg.n2}},
                          {"alternating", reg.alternating},
                          {"merged_zeros", reg.merged_zeros},
                          {"min_abs_w", number(reg.min_abs_W)},
                          {"max_abs_w", number(reg.max_abs_W)},
                          {"min_relative_w", number(reg.min_relative_W)},
                          {"zero_free", reg.zero_free},
                          {"theorem_case", to_string(reg.theorem_case)},
                          {"extrema_at_zeros", reg.extrema_at_zeros},
                          {"single_signed", reg.single_signed},
                          {"monotone_segments", reg.monotone_segments}};
  checks.add("wronskian_zero_free", reg.min_relative_W, tol.zero_free, true, true);
  checks.add("wronskian_min_over_max", reg.max_abs_W > 0 ? reg.min_abs_W / reg.max_abs_W : 0.0, tol.zero_free, false,
             true);
  const double identity = check_W_derivative_identity(pair->u1, pair->u2, pair->alpha1, pair->alpha2);
  report["w_identity_residual"] = number(identity);
  checks.add("w_identity", identity, tol.w_identity, true);

  const auto predicted = predict_outcome(spec, pair->u1, pair->u2, *h0);
  report["predicted_outcome"] = {{"case", to_string(predicted.label)},
                                 {"deleted", predicted.deleted},
                                 {"created", predicted.created},
                                 {"basis", predicted.basis_note}};
  checks.flag("outcome_case_known", predicted.label != OutcomeCase::unknown, true);

  if (pair->regular()) {
    try {
      verify_regular_pair(cfg, *pair, *h0, predicted, report, checks, result.files);
    } catch (const std::exception& e) {
      checks.error("verification", e.what(), true);
    }
  } else {
    checks.flag("pair_regular", false, true);
  }

  report["checks"] = checks.json();
  result.exit_code = checks.passed() ? exit_ok : exit_verification_failed;
  report["status"] = checks.passed() ? "passed" : "failed";
  write_report(cfg.output_dir, report, result.files);
  return result;
}

int run_spectrum(const RunConfig& cfg, std::ostream& out) {
  Potential potential = cfg.make_potential();
  const Grid grid = cfg.make_grid();
  const auto spectrum = compute_spectrum(potential, cfg.k_max, grid, ShootingOptions{cfg.tol.energy, cfg.tol.mismatch});
  fs::create_directories(cfg.output_dir);
  write_spectrum_csv(cfg.output_dir / "spectrum_h0.csv", spectrum.levels);
  out << "k,E\n";
  for (std::size_t k = 0; k < spectrum.levels.size(); ++k) out << k << ',' << csv::format(spectrum.levels[k]) << '\n';
  return exit_ok;
}

}  // namespace forge
