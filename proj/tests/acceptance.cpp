// Prints one PASS/FAIL line per acceptance criterion. Exits nonzero if any
// criterion fails other than the two documented as unattainable for x^2.
#include "forge/susy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace forge;

namespace {

struct Setup {
  Grid grid{-10.0, 10.0, 20001};
  Potential v0 = make_builtin_potential("harmonic", std::vector<double>{1.0});
  Samples v0_samples = v0.sample(grid);
  Spectrum h0 = compute_spectrum(v0, 19, grid);
};

struct CaseRun {
  std::string name;
  TransformSpec spec;
  DarbouxPair pair;
  SpectralOutcome predicted;
  Spectrum h2;
};

int hard_failures = 0;

void report(int n, bool ok, const std::string& detail, bool unattainable = false) {
  const char* verdict = ok ? "PASS" : (unattainable ? "FAIL (unattainable, see README)" : "FAIL");
  std::printf("criterion %d: %s %s\n", n, verdict, detail.c_str());
  std::fflush(stdout);
  if (!ok && !unattainable) ++hard_failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

CaseRun run_case(const Setup& s, const std::string& name, double a1, Selector s1, double a2, Selector s2) {
  const auto spec = validate(TransformSpec{0, a1, a2, s1, s2}, s.h0);
  auto u1 = construct_transformation_function(s.v0_samples, spec.alpha1, s1, 0, s.h0, s.grid);
  auto u2 = construct_transformation_function(s.v0_samples, spec.alpha2, s2, 1, s.h0, s.grid);
  auto pair = second_order_transform(s.v0, u1, u2);
  auto predicted = predict_outcome(spec, pair.u1, pair.u2, s.h0);
  auto h2 = partner_spectrum(pair, 9);
  return {name, spec, std::move(pair), std::move(predicted), std::move(h2)};
}

void criterion1(const Setup& s) {
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k) worst = std::max(worst, std::abs(s.h0.levels[k] - (2.0 * k + 1.0)));
  report(1, worst < 1e-8, "max |E_k - (2k+1)|, k <= 8: " + fmt("%.3e", worst));
}

void criterion2(const std::vector<CaseRun>& cases) {
  const auto& f = *std::find_if(cases.begin(), cases.end(), [](const CaseRun& c) { return c.name == "F"; });
  double dv = 0.0;
  for (Index i = 0; i < f.pair.grid.size(); ++i) {
    const double x = f.pair.grid.x(i);
    if (std::abs(x) <= 6.0) dv = std::max(dv, std::abs(f.pair.v2.values[i] - (x * x + 4.0)));
  }
  double de = 0.0;
  for (int k = 0; k < 5; ++k) de = std::max(de, std::abs(f.h2.levels[k] - (2.0 * k + 5.0)));
  report(2, dv < 1e-6 && de < 1e-6,
         "max |V2 - (x^2+4)| on |x|<=6: " + fmt("%.3e", dv) + ", spectrum(h2) vs {5..13}: " + fmt("%.3e", de));
}

void criteria3and4(const Setup& s) {
  std::mt19937_64 rng(20261016);
  int structural_ok = 0, literal_ok = 0, relative_ok = 0, identity_ok = 0;
  double worst_ratio = 1.0, worst_relative = 1.0, worst_identity = 0.0;
  constexpr int kPairs = 50;
  for (int i = 0; i < kPairs; ++i) {
    const int k = i % 4;
    const double lo = s.h0.levels[k], hi = s.h0.levels[k + 1];
    std::uniform_real_distribution<double> in_gap(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo));
    double a1 = in_gap(rng), a2 = in_gap(rng);
    if (a1 > a2) std::swap(a1, a2);
    if (a2 - a1 < 1e-3) a2 = std::min(hi - 0.01, a1 + 1e-2);
    const auto u1 = construct_u_with_nodes(s.v0_samples, a1, k + 2, s.h0, s.grid);
    const auto u2 = construct_u_with_nodes(s.v0_samples, a2, k + 1, s.h0, s.grid);
    const auto pair = second_order_transform(s.v0, u1, u2);
    const auto reg = verify_wronskian_regularity(pair, s.h0);
    const bool structural = reg.n1 == k + 2 && reg.n2 == k + 1 && reg.alternating &&
                            static_cast<int>(reg.merged_zeros.size()) == 2 * k + 3;
    structural_ok += structural;
    const double ratio = reg.min_abs_W / reg.max_abs_W;
    worst_ratio = std::min(worst_ratio, ratio);
    literal_ok += ratio > 1e-10;
    worst_relative = std::min(worst_relative, reg.min_relative_W);
    relative_ok += reg.zero_free && reg.min_relative_W > 1e-10;
    const double id = check_W_derivative_identity(u1, u2, a1, a2);
    worst_identity = std::max(worst_identity, id);
    identity_ok += id < 1e-4;
  }
  report(3, structural_ok == kPairs,
         "node counts (k+2,k+1), alternating zeros, 2k+3 merged zeros: " + std::to_string(structural_ok) + "/50");
  report(3, literal_ok == kPairs,
         "literal min|W|/max|W| > 1e-10: " + std::to_string(literal_ok) + "/50, worst " + fmt("%.3e", worst_ratio),
         true);
  std::printf("criterion 3: info pointwise relative |W| > 1e-10 (zero-free): %d/50, worst %.3e\n", relative_ok,
              worst_relative);

  const auto psi0 = eigenfunction(s.h0, 0), psi1 = eigenfunction(s.h0, 1);
  const double closed = check_W_derivative_identity(psi0, psi1, psi0.energy(), psi1.energy());
  report(4, identity_ok == kPairs && closed < 1e-6,
         "random pairs below 1e-4: " + std::to_string(identity_ok) + "/50 (worst " + fmt("%.3e", worst_identity) +
             "), (psi0,psi1): " + fmt("%.3e", closed));
}

void criterion5(const Setup& s, const std::vector<CaseRun>& cases) {
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto cmp = verify_outcome(c.predicted, s.h0, c.h2);
    ok = ok && cmp.passed();
    detail += c.name + "=" + std::string(to_string(c.predicted.label)) + " dev " + fmt("%.1e", cmp.max_deviation) + "; ";
  }
  const auto& a = cases.front();
  const auto deg = check_degeneracy(s.h0, a.h2, a.predicted, s.h0.levels[5]);
  ok = ok && deg.passed;
  report(5, ok, detail + "case A degeneracy up to E5: " + (deg.passed ? "ok" : "broken"));
}

void criterion6(const Setup& s, const std::vector<CaseRun>& cases) {
  bool ok = true;
  double it = 0, f1 = 0, f2 = 0, ann = 0;
  const auto tests = intertwining_test_set(s.v0_samples, s.h0, 6, {}, s.grid);
  for (const auto& c : cases) {
    const double r = intertwining_residual(c.pair, tests);
    const auto alg = factorization_residual(c.pair, s.h0, c.h2, 6);
    it = std::max(it, r);
    f1 = std::max(f1, alg.factorization_residual_l_adj_l);
    f2 = std::max(f2, alg.factorization_residual_l_l_adj);
    ann = std::max({ann, alg.annihilation_u1, alg.annihilation_u2});
    ok = ok && r < 1e-4 && alg.factorization_residual_l_adj_l < 1e-4 && alg.factorization_residual_l_l_adj < 1e-4 &&
         alg.annihilation_u1 < 1e-8 && alg.annihilation_u2 < 1e-8 && alg.test_set_size >= 6;
  }
  report(6, ok,
         "worst intertwining " + fmt("%.2e", it) + ", L+L " + fmt("%.2e", f1) + ", LL+ " + fmt("%.2e", f2) +
             ", annihilation " + fmt("%.2e", ann) + " over " + std::to_string(tests.size()) + " test functions");
}

void criterion7(const std::vector<CaseRun>& cases) {
  double worst = 0.0;
  std::string detail;
  for (const auto& c : cases) {
    const double d = asymptotic_deviation(c.pair);
    worst = std::max(worst, d);
    detail += c.name + " " + fmt("%.2e", d) + "; ";
  }
  report(7, worst < 1e-3, "max |V2 - V0| on outer 5%: " + detail, true);
}

void criterion8(const Setup& s, const std::vector<CaseRun>& cases) {
  int mismatches = 0;
  for (const auto& c : cases) mismatches += check_integrability(c.pair, kernel_functions(c.pair), s.h0, c.h2).mismatches;
  report(8, mismatches == 0, "mismatches across A-F: " + std::to_string(mismatches));
}

void criterion9(const Setup& s, const std::vector<CaseRun>& cases) {
  bool ok = true;
  std::string detail;
  const Samples probe = gaussian_probe(s.grid, 0.0, 1.0);
  for (const auto& c : cases) {
    if (c.name != "A" && c.name != "F") continue;
    const auto basis = completeness_basis(c.pair, c.predicted, s.h0, 16);
    const auto r = reconstruction_residuals(basis, probe, s.grid);
    bool monotone = true;
    // Members of the wrong parity leave the residual flat up to rounding.
    for (int m = 4; m < 16; ++m) monotone = monotone && r[m] <= r[m - 1] * (1.0 + 1e-12);
    ok = ok && monotone && r[15] < 1e-2;
    detail += c.name + ": M=4 " + fmt("%.2e", r[3]) + ", M=16 " + fmt("%.2e", r[15]) +
              (monotone ? " monotone; " : " not monotone; ");
    std::printf("criterion 9: info case %s probe panel at M=16:", c.name.c_str());
    for (double center : {-1.0, 0.0, 1.0}) {
      for (double width : {0.5, 1.0, 2.0}) {
        const auto rp = reconstruction_residuals(basis, gaussian_probe(s.grid, center, width), s.grid);
        std::printf(" (%g,%g)=%.2e", center, width, rp[15]);
      }
    }
    std::printf("\n");
  }
  report(9, ok, "probe exp(-x^2): " + detail);
}

void criterion10(const Potential& v0) {
  auto error_at = [&](Index n) {
    const auto sp = compute_spectrum(v0, 8, Grid(-10.0, 10.0, n));
    double worst = 0.0;
    for (int k = 0; k <= 8; ++k) worst = std::max(worst, std::abs(sp.levels[k] - (2.0 * k + 1.0)));
    return worst;
  };
  const double e501 = error_at(501), e1001 = error_at(1001), e2001 = error_at(2001), e4001 = error_at(4001);
  const double ratio = e1001 / e2001;
  report(10, ratio >= 16.0,
         "error ratio n 1001 -> 2001: " + fmt("%.4f", ratio) + " (501 -> 1001: " + fmt("%.4f", e501 / e1001) +
             ", 2001 -> 4001: " + fmt("%.4f", e2001 / e4001) + ")");
}

}  // namespace

int main() {
  try {
    const Setup s;
    criterion1(s);
    std::vector<CaseRun> cases;
    cases.push_back(run_case(s, "A", 1.5, Selector::target(2), 2.5, Selector::target(1)));
    cases.push_back(run_case(s, "B", 1.5, Selector::target(2), 2.5, Selector::pure_left()));
    cases.push_back(run_case(s, "C", 1.5, Selector::target(2), 3.0, Selector::eigenstate()));
    cases.push_back(run_case(s, "D", 1.0, Selector::eigenstate(), 2.5, Selector::target(1)));
    cases.push_back(run_case(s, "E", 1.0, Selector::eigenstate(), 2.5, Selector::pure_left()));
    cases.push_back(run_case(s, "F", 1.0, Selector::eigenstate(), 3.0, Selector::eigenstate()));
    criterion2(cases);
    criteria3and4(s);
    criterion5(s, cases);
    criterion6(s, cases);
    criterion7(cases);
    criterion8(s, cases);
    criterion9(s, cases);
    criterion10(s.v0);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  return hard_failures == 0 ? 0 : 1;
}
