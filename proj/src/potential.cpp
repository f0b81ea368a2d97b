#include "forge/potential.hpp"

#include "forge/csv.hpp"
#include "forge/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forge {

namespace {

double quadratic_through(double x, const double* xs, const double* ys) {
  const double l0 = (x - xs[1]) * (x - xs[2]) / ((xs[0] - xs[1]) * (xs[0] - xs[2]));
  const double l1 = (x - xs[0]) * (x - xs[2]) / ((xs[1] - xs[0]) * (xs[1] - xs[2]));
  const double l2 = (x - xs[0]) * (x - xs[1]) / ((xs[2] - xs[0]) * (xs[2] - xs[1]));
  return ys[0] * l0 + ys[1] * l1 + ys[2] * l2;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw std::invalid_argument("spline: x and y sizes differ");
  if (n < 3) throw std::invalid_argument("spline: need at least 3 knots");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw std::invalid_argument("spline: non-finite knot");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw std::invalid_argument("spline: knots must be strictly increasing");
  }

  // Natural end conditions; Thomas algorithm on the interior equations.
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double a = h0 / 6.0;
    const double b = (h0 + h1) / 3.0;
    const double cc = h1 / 6.0;
    const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
  }
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  if (x < x_.front()) return quadratic_through(x, x_.data(), y_.data());
  if (x > x_.back()) return quadratic_through(x, x_.data() + n - 3, y_.data() + n - 3);
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i >= n - 1) i = n - 2;
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  if (b == 0.0) return y_[i];
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

Potential::Potential(std::variant<Builtin, Tabulated> kind) : kind_(std::move(kind)) {}

Potential Potential::builtin(std::string_view name, std::span<const double> params) {
  for (double p : params) {
    if (!std::isfinite(p)) throw std::invalid_argument("potential parameter is not finite");
  }
  auto expect = [&](std::size_t count) {
    if (params.size() != count) {
      throw std::invalid_argument(std::string(name) + " expects " + std::to_string(count) + " parameter(s)");
    }
  };
  Potential p(Builtin{std::string(name), {params.begin(), params.end()}});
  p.symmetry_ = Symmetry::even;
  if (name == "harmonic" || name == "quartic") {
    expect(1);
    if (!(params[0] > 0.0)) throw std::invalid_argument(std::string(name) + " stiffness must be positive");
    p.lower_bound_ = 0.0;
  } else if (name == "shifted_harmonic") {
    expect(2);
    if (!(params[0] > 0.0)) throw std::invalid_argument("shifted_harmonic stiffness must be positive");
    p.lower_bound_ = params[1];
  } else {
    throw std::invalid_argument("unknown potential '" + std::string(name) + "'");
  }
  return p;
}

Potential Potential::tabulated(std::vector<double> x, std::vector<double> v) {
  Potential p(Tabulated{CubicSpline(std::move(x), std::move(v))});
  const auto& spline = std::get<Tabulated>(p.kind_).spline;
  p.lower_bound_ = *std::min_element(spline.values().begin(), spline.values().end());
  p.symmetry_ = Symmetry::none;
  return p;
}

double Potential::operator()(double x) const {
  if (const auto* b = std::get_if<Builtin>(&kind_)) {
    const double c = b->params[0];
    if (b->name == "harmonic") return c * x * x;
    if (b->name == "quartic") return c * x * x * x * x;
    return c * x * x + b->params[1];
  }
  return std::get<Tabulated>(kind_).spline(x);
}

Samples Potential::sample(const Grid& grid) const {
  Samples v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = (*this)(grid.x(i));
  return v;
}

std::string Potential::describe() const {
  if (const auto* b = std::get_if<Builtin>(&kind_)) {
    std::string s = b->name + "(";
    for (std::size_t i = 0; i < b->params.size(); ++i) {
      if (i) s += ",";
      s += csv::format(b->params[i]);
    }
    return s + ")";
  }
  return "tabulated(" + std::to_string(std::get<Tabulated>(kind_).spline.knots().size()) + " points)";
}

Potential make_builtin_potential(std::string_view name, std::span<const double> params) {
  return Potential::builtin(name, params);
}

Potential read_potential_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open potential table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  const auto header = csv::split(line);
  if (header.size() < 2 || header[0] != "x" || header[1] != "V" ||
      (header.size() == 3 && header[2] != "is_pole") || header.size() > 3) {
    throw std::runtime_error(path.string() + ": expected header 'x,V'");
  }
  std::vector<double> xs, vs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto cols = csv::split(line);
    if (cols.size() != header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    }
    const auto x = csv::parse_number(cols[0]);
    const auto v = csv::parse_number(cols[1]);
    if (!x || !v) throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad number");
    if (cols.size() == 3 && cols[2] != "0") {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": potential has a pole");
    }
    xs.push_back(*x);
    vs.push_back(*v);
  }
  return Potential::tabulated(std::move(xs), std::move(vs));
}

void write_potential_csv(const std::filesystem::path& path, const Grid& grid, const Samples& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "x,V\n";
  for (Index i = 0; i < grid.size(); ++i) out << csv::format(grid.x(i)) << ',' << csv::format(v[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string_view to_string(PotentialLabel label) {
  switch (label) {
    case PotentialLabel::scattering: return "scattering";
    case PotentialLabel::confining_regular: return "confining_regular";
    case PotentialLabel::unknown: break;
  }
  return "unknown";
}

namespace {

struct TailTest {
  double total = 0.0;
  bool converges = false;
};

// An improper integral is taken as convergent when its partial integral over
// the outer half of each side is negligible in absolute terms or clearly
// smaller than the band just inside it (tail sums shrinking outward).
TailTest tail_integral(const Grid& grid, const Samples& f, const std::vector<bool>& mask) {
  constexpr double kAbsolute = 1e-6;
  constexpr double kShrink = 0.75;
  const double h = grid.spacing();
  double total = 0.0, outer = 0.0, inner = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const double w = (i == 0 || i == grid.size() - 1) ? 0.5 * h : h;
    const double x = grid.x(i);
    const double edge = x >= 0.0 ? grid.x_max() : grid.x_min();
    const double t = x / edge;  // 0 at the origin, 1 at the edge on this side
    total += w * f[i];
    if (t >= 0.5) outer += w * f[i];
    else if (t >= 0.25) inner += w * f[i];
  }
  return {total, outer <= kAbsolute || outer < kShrink * inner};
}

}  // namespace

PotentialClass classify_potential(const Potential& potential, const Grid& grid) {
  const Samples v = potential.sample(grid);
  const Samples dv = first_derivative(v, grid.spacing());
  const Samples d2v = second_derivative(v, grid.spacing());
  const Index n = grid.size();

  PotentialClass out;
  std::vector<bool> all(static_cast<std::size_t>(n), true);
  std::vector<bool> large(static_cast<std::size_t>(n), false);
  Samples moment(n), slope(n), curvature(n);
  for (Index i = 0; i < n; ++i) {
    const double av = std::abs(v[i]);
    moment[i] = std::abs(grid.x(i) * v[i]);
    large[static_cast<std::size_t>(i)] = av >= 1.0;
    if (av >= 1.0) {
      const double r = dv[i] / std::pow(av, 1.25);
      slope[i] = r * r;
      curvature[i] = std::abs(d2v[i]) / std::pow(av, 1.5);
    } else {
      slope[i] = curvature[i] = 0.0;
    }
  }
  const auto m = tail_integral(grid, moment, all);
  const auto s = tail_integral(grid, slope, large);
  const auto c = tail_integral(grid, curvature, large);
  out.moment_integral = m.total;
  out.slope_integral = s.total;
  out.curvature_integral = c.total;
  out.moment_converges = m.converges;
  out.slope_converges = s.converges;
  out.curvature_converges = c.converges;

  if (v.cwiseAbs().maxCoeff() < 1e-8) return out;  // degenerate: V == 0

  // Confining shape: |V| large at both edges and still growing outward.
  const Index quarter = grid.edge_band(0.5);
  const bool confining = std::abs(v[0]) >= 1.0 && std::abs(v[n - 1]) >= 1.0 &&
                         std::abs(v[0]) > std::abs(v[quarter]) &&
                         std::abs(v[n - 1]) > std::abs(v[n - 1 - quarter]);
  if (confining && out.slope_converges && out.curvature_converges) {
    out.label = PotentialLabel::confining_regular;
  } else if (!confining && out.moment_converges) {
    out.label = PotentialLabel::scattering;
  }
  return out;
}

}  // namespace forge
