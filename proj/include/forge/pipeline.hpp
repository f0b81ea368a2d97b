#pragma once

#include "forge/config.hpp"
#include "forge/darboux.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace forge {

enum ExitCode : int { exit_ok = 0, exit_verification_failed = 1, exit_config_error = 2, exit_construction_error = 3 };

struct RunResult {
  int exit_code = exit_ok;
  nlohmann::ordered_json report;
  std::vector<std::filesystem::path> files;
};

/// Builds the pair described by `config`, runs every verification and
/// writes report.json plus the CSV bundle into config.output_dir.
RunResult run_pipeline(const RunConfig& config);

/// Writes V0, V1, V2, u1, u2, W and (for regular pairs) v1, v2 as CSV files.
std::vector<std::filesystem::path> emit_plot_data(const DarbouxPair& pair, const std::filesystem::path& outdir);

/// Writes `x,value` rows.
void write_samples_csv(const std::filesystem::path& path, const Grid& grid, const Samples& values);

/// Writes `k,E` rows.
void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& levels);

/// Spectrum of the seed only: prints the levels and writes spectrum_h0.csv.
int run_spectrum(const RunConfig& config, std::ostream& out);

}  // namespace forge
