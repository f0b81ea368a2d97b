#pragma once

#include "forge/regularity.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge {

/// Raised for malformed or inconsistent run configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `section.key = value` text; `#` starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

struct Tolerances {
  double energy = 1e-12;         // bisection on each level
  double mismatch = 1e-6;        // matching defect of a converged level
  double spectrum_match = 1e-5;  // h2 levels vs predicted levels
  double zero_free = 1e-10;      // relative Wronskian floor
  double w_identity = 1e-4;
  double intertwining = 1e-4;
  double factorization = 1e-4;
  double annihilation = 1e-8;
  double kernel_residual = 1e-5;
  double asymptotic = 1e-3;
  double completeness = 1e-2;
};

struct RunConfig {
  std::string potential_name = "harmonic";
  std::vector<double> potential_params{1.0};
  std::optional<std::filesystem::path> potential_file;

  double x_min = -10.0;
  double x_max = 10.0;
  Index grid_n = 20001;

  int k = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  Selector u1 = Selector::target(2);
  Selector u2 = Selector::target(1);

  int k_max = 8;
  std::vector<int> phi_levels{0, 1, 2};
  std::vector<double> gap_energies;
  int basis_max = 16;
  int basis_min = 4;
  double probe_center = 0.0;
  double probe_width = 1.0;

  std::filesystem::path output_dir = "out";
  Tolerances tol;

  /// Potential named by the configuration. Throws ConfigError.
  Potential make_potential() const;
  Grid make_grid() const;
};

/// Builds a RunConfig from key/value pairs. Relative paths are resolved
/// against `base_dir`. Throws ConfigError on unknown keys, bad values or a
/// violated alpha ordering.
RunConfig make_run_config(const std::map<std::string, std::string>& values, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

/// Command-line overrides applied after loading.
struct Overrides {
  std::optional<Index> grid_n;
  std::optional<double> x_max;
  std::optional<int> k_max;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

}  // namespace forge
