#pragma once

#include "forge/grid.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace forge {

enum class Symmetry { even, none };

/// Natural cubic spline through (x, y) knots. Outside the table the value
/// follows the quadratic through the three outermost knots on that side.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

/// Real potential V(x) on the line: either a named closed form or a table.
class Potential {
 public:
  struct Builtin {
    std::string name;
    std::vector<double> params;
  };
  struct Tabulated {
    CubicSpline spline;
  };

  static Potential builtin(std::string_view name, std::span<const double> params);
  static Potential tabulated(std::vector<double> x, std::vector<double> v);

  double operator()(double x) const;
  Samples sample(const Grid& grid) const;

  double lower_bound() const { return lower_bound_; }
  Symmetry symmetry_hint() const { return symmetry_; }
  bool is_builtin() const { return std::holds_alternative<Builtin>(kind_); }
  const std::variant<Builtin, Tabulated>& kind() const { return kind_; }

  /// Human-readable description, e.g. "harmonic(1)" or "tabulated(20001 points)".
  std::string describe() const;

 private:
  explicit Potential(std::variant<Builtin, Tabulated> kind);

  std::variant<Builtin, Tabulated> kind_;
  double lower_bound_ = 0.0;
  Symmetry symmetry_ = Symmetry::none;
};

/// Builtin kinds: harmonic [stiffness] -> c x^2, quartic [c] -> c x^4,
/// shifted_harmonic [stiffness, offset] -> c x^2 + offset.
/// Throws std::invalid_argument for unknown names or bad parameters.
Potential make_builtin_potential(std::string_view name, std::span<const double> params);

/// Reads a two-column `x,V` CSV. An optional third `is_pole` column is
/// accepted but any flagged row is rejected.
Potential read_potential_csv(const std::filesystem::path& path);

/// Writes samples as a two-column `x,V` table readable by read_potential_csv.
void write_potential_csv(const std::filesystem::path& path, const Grid& grid, const Samples& v);

enum class PotentialLabel { scattering, confining_regular, unknown };

std::string_view to_string(PotentialLabel label);

struct PotentialClass {
  PotentialLabel label = PotentialLabel::unknown;
  /// Integral of |x V| over the grid.
  double moment_integral = 0.0;
  /// Integral of |V'/V^{5/4}|^2 over the grid points where |V| >= 1.
  double slope_integral = 0.0;
  /// Integral of |V''|/|V|^{3/2} over the grid points where |V| >= 1.
  double curvature_integral = 0.0;
  bool moment_converges = false;
  bool slope_converges = false;
  bool curvature_converges = false;
};

/// Labels V from the tail behaviour of the three integrals on the grid.
PotentialClass classify_potential(const Potential& v, const Grid& grid);

}  // namespace forge
