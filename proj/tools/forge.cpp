#include "forge/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace {

struct Options {
  std::optional<forge::Index> grid_n;
  std::optional<double> x_max;
  std::optional<int> k_max;
};

void add_overrides(CLI::App* cmd, Options& opts) {
  cmd->add_option("--grid-n", opts.grid_n, "number of grid points");
  cmd->add_option("--x-max", opts.x_max, "half-width of the symmetric grid");
  cmd->add_option("--k-max", opts.k_max, "highest level computed for spectra");
}

forge::RunConfig load(const fs::path& path, const Options& opts) {
  auto config = forge::load_run_config(path);
  forge::apply_overrides(config, {opts.grid_n, opts.x_max, opts.k_max});
  return config;
}

std::string summary(const forge::RunResult& r) {
  std::string line = r.report.value("status", std::string("unknown"));
  if (r.report.contains("predicted_outcome")) {
    line += ", case " + r.report["predicted_outcome"]["case"].get<std::string>();
  }
  if (r.report.contains("error")) line += ": " + r.report["error"].get<std::string>();
  return line;
}

int run_one(const fs::path& path, const Options& opts, const std::optional<fs::path>& outdir, std::string& message) {
  try {
    auto config = load(path, opts);
    if (outdir) config.output_dir = *outdir;
    const auto result = forge::run_pipeline(config);
    message = summary(result) + " -> " + (config.output_dir / "report.json").string();
    return result.exit_code;
  } catch (const forge::ConfigError& e) {
    message = std::string("config error: ") + e.what();
    return forge::exit_config_error;
  } catch (const std::exception& e) {
    message = std::string("construction error: ") + e.what();
    return forge::exit_construction_error;
  }
}

int run_suite(const fs::path& dir, const Options& opts, const fs::path& out_root, unsigned jobs) {
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::cerr << "no .cfg files in " << dir << '\n';
    return forge::exit_config_error;
  }
  std::vector<int> codes(configs.size(), 0);
  std::vector<std::string> messages(configs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      codes[i] = run_one(configs[i], opts, out_root / configs[i].stem(), messages[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size()))); ++t) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) t.join();
  int worst = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::cout << configs[i].stem().string() << ": exit " << codes[i] << " (" << messages[i] << ")\n";
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order Darboux transformations of 1D Schroedinger operators"};
  app.require_subcommand(1);

  Options opts;
  fs::path config_path, suite_dir;
  std::optional<fs::path> suite_out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "build one transformation and verify it");
  run->add_option("config", config_path, "run configuration")->required()->check(CLI::ExistingFile);
  add_overrides(run, opts);

  auto* suite = app.add_subcommand("suite", "run every .cfg file in a directory");
  suite->add_option("dir", suite_dir, "directory of configurations")->required()->check(CLI::ExistingDirectory);
  suite->add_option("--out", suite_out, "output root (default <dir>/results)");
  suite->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  add_overrides(suite, opts);

  auto* spectrum = app.add_subcommand("spectrum", "bound states of the seed potential");
  spectrum->add_option("config", config_path, "run configuration")->required()->check(CLI::ExistingFile);
  add_overrides(spectrum, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : forge::exit_config_error;
  }

  if (*run) {
    std::string message;
    const int code = run_one(config_path, opts, std::nullopt, message);
    (code == forge::exit_ok ? std::cout : std::cerr) << message << '\n';
    return code;
  }
  if (*suite) return run_suite(suite_dir, opts, suite_out.value_or(suite_dir / "results"), jobs);

  try {
    return forge::run_spectrum(load(config_path, opts), std::cout);
  } catch (const forge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return forge::exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "spectrum failed: " << e.what() << '\n';
    return forge::exit_construction_error;
  }
}
