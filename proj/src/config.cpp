#include "forge/config.hpp"

#include "forge/csv.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace forge {

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const auto body = csv::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key(csv::trim(body.substr(0, eq)));
    const std::string value(csv::trim(body.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (!out.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }
  return out;
}

namespace {

double to_number(const std::string& key, const std::string& value) {
  const auto v = csv::parse_number(value);
  if (!v || !std::isfinite(*v)) throw ConfigError(key + ": not a finite number: '" + value + "'");
  return *v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_number(key, value);
  if (std::floor(v) != v || std::abs(v) > 1e9) throw ConfigError(key + ": not an integer: '" + value + "'");
  return static_cast<int>(v);
}

double to_positive(const std::string& key, const std::string& value) {
  const double v = to_number(key, value);
  if (!(v > 0.0)) throw ConfigError(key + ": must be positive");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  if (csv::trim(value).empty()) return out;
  for (auto part : csv::split(value, ',')) out.push_back(to_number(key, std::string(csv::trim(part))));
  return out;
}

}  // namespace

RunConfig make_run_config(const std::map<std::string, std::string>& values, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.output_dir = base_dir / "out";
  bool have_alpha1 = false, have_alpha2 = false;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"potential.name", [&](auto&, auto& v) { c.potential_name = v; }},
      {"potential.params", [&](auto& k, auto& v) { c.potential_params = to_list(k, v); }},
      {"potential.file", [&](auto&, auto& v) { c.potential_file = base_dir / v; }},
      {"grid.x_min", [&](auto& k, auto& v) { c.x_min = to_number(k, v); }},
      {"grid.x_max", [&](auto& k, auto& v) { c.x_max = to_number(k, v); }},
      {"grid.n", [&](auto& k, auto& v) { c.grid_n = to_int(k, v); }},
      {"transform.k", [&](auto& k, auto& v) { c.k = to_int(k, v); }},
      {"transform.alpha1", [&](auto& k, auto& v) { c.alpha1 = to_number(k, v); have_alpha1 = true; }},
      {"transform.alpha2", [&](auto& k, auto& v) { c.alpha2 = to_number(k, v); have_alpha2 = true; }},
      {"transform.u1", [&](auto& k, auto& v) {
         try { c.u1 = parse_selector(v); } catch (const std::invalid_argument& e) { throw ConfigError(k + ": " + e.what()); }
       }},
      {"transform.u2", [&](auto& k, auto& v) {
         try { c.u2 = parse_selector(v); } catch (const std::invalid_argument& e) { throw ConfigError(k + ": " + e.what()); }
       }},
      {"spectrum.k_max", [&](auto& k, auto& v) { c.k_max = to_int(k, v); }},
      {"output.dir", [&](auto&, auto& v) { c.output_dir = base_dir / v; }},
      {"output.phi", [&](auto& k, auto& v) {
         c.phi_levels.clear();
         for (double n : to_list(k, v)) {
           if (n < 0 || std::floor(n) != n) throw ConfigError(k + ": levels must be non-negative integers");
           c.phi_levels.push_back(static_cast<int>(n));
         }
       }},
      {"verify.gap_energies", [&](auto& k, auto& v) { c.gap_energies = to_list(k, v); }},
      {"completeness.basis_max", [&](auto& k, auto& v) { c.basis_max = to_int(k, v); }},
      {"completeness.basis_min", [&](auto& k, auto& v) { c.basis_min = to_int(k, v); }},
      {"completeness.probe_center", [&](auto& k, auto& v) { c.probe_center = to_number(k, v); }},
      {"completeness.probe_width", [&](auto& k, auto& v) { c.probe_width = to_positive(k, v); }},
      {"tolerance.energy", [&](auto& k, auto& v) { c.tol.energy = to_positive(k, v); }},
      {"tolerance.mismatch", [&](auto& k, auto& v) { c.tol.mismatch = to_positive(k, v); }},
      {"tolerance.spectrum_match", [&](auto& k, auto& v) { c.tol.spectrum_match = to_positive(k, v); }},
      {"tolerance.zero_free", [&](auto& k, auto& v) { c.tol.zero_free = to_positive(k, v); }},
      {"tolerance.w_identity", [&](auto& k, auto& v) { c.tol.w_identity = to_positive(k, v); }},
      {"tolerance.intertwining", [&](auto& k, auto& v) { c.tol.intertwining = to_positive(k, v); }},
      {"tolerance.factorization", [&](auto& k, auto& v) { c.tol.factorization = to_positive(k, v); }},
      {"tolerance.annihilation", [&](auto& k, auto& v) { c.tol.annihilation = to_positive(k, v); }},
      {"tolerance.kernel_residual", [&](auto& k, auto& v) { c.tol.kernel_residual = to_positive(k, v); }},
      {"tolerance.asymptotic", [&](auto& k, auto& v) { c.tol.asymptotic = to_positive(k, v); }},
      {"tolerance.completeness", [&](auto& k, auto& v) { c.tol.completeness = to_positive(k, v); }},
  };
  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + key + "'");
    it->second(key, value);
  }

  if (!have_alpha1 || !have_alpha2) throw ConfigError("transform.alpha1 and transform.alpha2 are required");
  if (!(c.alpha2 > c.alpha1)) throw ConfigError("alpha ordering violated: need transform.alpha2 > transform.alpha1");
  if (c.k < 0) throw ConfigError("transform.k must be >= 0");
  if (c.k_max < c.k + 1) throw ConfigError("spectrum.k_max must reach level k+1");
  if (c.basis_min < 1 || c.basis_max < c.basis_min) throw ConfigError("completeness basis sizes out of order");
  if (c.potential_name == "tabulated") {
    if (!c.potential_file) throw ConfigError("potential.file is required for a tabulated potential");
    if (!std::filesystem::exists(*c.potential_file)) {
      throw ConfigError("potential.file not found: " + c.potential_file->string());
    }
  }
  try {
    c.make_grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  if (c.potential_name != "tabulated") c.make_potential();
  return c;
}

Potential RunConfig::make_potential() const {
  try {
    if (potential_name == "tabulated") return read_potential_csv(*potential_file);
    return make_builtin_potential(potential_name, potential_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
}

Grid RunConfig::make_grid() const { return Grid(x_min, x_max, grid_n); }

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return make_run_config(parse_key_values(buffer.str()), path.parent_path());
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  if (overrides.grid_n) config.grid_n = *overrides.grid_n;
  if (overrides.x_max) {
    config.x_min = -*overrides.x_max;
    config.x_max = *overrides.x_max;
  }
  if (overrides.k_max) config.k_max = *overrides.k_max;
  if (config.k_max < config.k + 1) throw ConfigError("spectrum.k_max must reach level k+1");
  try {
    config.make_grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

}  // namespace forge
