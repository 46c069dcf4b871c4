#include "intop/radial.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <limits>
#include <locale>
#include <sstream>

#include "intop/errors.hpp"

namespace intop {

RadialGrid::RadialGrid(double r_max, std::size_t n_nodes)
    : r_max_(r_max), n_nodes_(n_nodes), spacing_(0.0) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw SizingError("radial grid: r_max must be positive and finite");
  }
  if (n_nodes < kMinNodes) {
    std::ostringstream msg;
    msg << "radial grid: need at least " << kMinNodes << " nodes, got "
        << n_nodes;
    throw SizingError(msg.str());
  }
  spacing_ = r_max / static_cast<double>(n_nodes - 1);
}

double RadialGrid::node(std::size_t j) const {
  if (j + 1 == n_nodes_) return r_max_;
  return static_cast<double>(j) * spacing_;
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(n_nodes_);
  for (std::size_t j = 0; j < n_nodes_; ++j) r[j] = node(j);
  return r;
}

RadialGrid make_grid(double r_max, std::size_t n_nodes) {
  return RadialGrid(r_max, n_nodes);
}

RadialProfile::RadialProfile(RadialGrid g, std::vector<Complex> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw SizingError("radial profile: value count does not match grid");
  }
}

RadialProfile::RadialProfile(RadialGrid g)
    : grid(g), values(g.size(), Complex{}) {}

RadialProfile RadialProfile::sample(const RadialGrid& g,
                                    const std::function<Complex(double)>& fn) {
  std::vector<Complex> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = fn(g.node(j));
  return RadialProfile(g, std::move(v));
}

namespace {

void require_same_grid(const RadialProfile& f, const RadialProfile& g) {
  if (!(f.grid == g.grid)) {
    throw GridMismatchError("profiles live on different radial grids");
  }
}

// conj(a) * b with a fixed operation order, so that swapping the arguments
// yields the exact complex conjugate.
struct ConjProduct {
  double re;
  double im;
};

inline ConjProduct conj_mul(Complex a, Complex b) {
  return {a.real() * b.real() + a.imag() * b.imag(),
          a.real() * b.imag() - a.imag() * b.real()};
}

// Simpson weights for nodes [first, last] of a uniform grid (inclusive).
std::vector<double> simpson_on_range(std::size_t count, double h) {
  std::vector<double> w(count, 0.0);
  if (count == 1) return w;
  if (count == 2) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const std::size_t simpson_count = (count % 2 == 1) ? count : count - 1;
  for (std::size_t j = 0; j < simpson_count; ++j) {
    double c = (j == 0 || j + 1 == simpson_count) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    w[j] = c * h / 3.0;
  }
  if (simpson_count != count) {
    w[count - 2] += 0.5 * h;
    w[count - 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

std::vector<double> simpson_weights(const RadialGrid& grid) {
  return simpson_on_range(grid.size(), grid.spacing());
}

std::vector<double> mass_weights(const RadialGrid& grid) {
  const auto w = simpson_weights(grid);
  std::vector<double> m(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.node(j);
    m[j] = kFourPi * (w[j] * (r * r));
  }
  return m;
}

std::vector<double> kinetic_cell_weights(const RadialGrid& grid) {
  const double h = grid.spacing();
  std::vector<double> c(grid.size() - 1);
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double a = grid.node(j);
    const double b = grid.node(j + 1);
    c[j] = kFourPi * ((b * b * b - a * a * a) / (3.0 * h * h));
  }
  return c;
}

std::vector<double> lambda_cell_weights(const RadialGrid& grid) {
  return std::vector<double>(grid.size() - 1, kFourPi / grid.spacing());
}

Complex inner_product(const RadialProfile& f, const RadialProfile& g) {
  require_same_grid(f, g);
  const auto m = mass_weights(f.grid);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto p = conj_mul(f.values[j], g.values[j]);
    re += m[j] * p.re;
    im += m[j] * p.im;
  }
  return {re, im};
}

RadialProfile apply_lambda(const RadialProfile& f) {
  const auto& grid = f.grid;
  const std::size_t n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  const auto& v = f.values;
  std::vector<Complex> out(n);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double r = grid.node(j);
    out[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h2 * r * r);
  }
  {
    const double r = grid.node(n - 1);
    out[n - 1] = (v[n - 1] - 2.0 * v[n - 2] + v[n - 3]) / (h2 * r * r);
  }
  out[0] = 3.0 * out[1] - 3.0 * out[2] + out[3];
  return RadialProfile(grid, std::move(out));
}

BoundaryData boundary_data(std::span<const Complex> values, double spacing) {
  if (values.size() < 3) {
    throw SizingError("boundary data needs at least three samples");
  }
  const Complex slope =
      (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * spacing);
  return {values[0], kFourPi * slope};
}

BoundaryData boundary_data(const RadialProfile& f) {
  return boundary_data(std::span<const Complex>(f.values), f.grid.spacing());
}

namespace {

Complex cell_form(const RadialProfile& f, const RadialProfile& g,
                  const std::vector<double>& cell) {
  require_same_grid(f, g);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < cell.size(); ++j) {
    const auto p = conj_mul(f.values[j + 1] - f.values[j],
                            g.values[j + 1] - g.values[j]);
    re += cell[j] * p.re;
    im += cell[j] * p.im;
  }
  return {re, im};
}

}  // namespace

Complex lambda_form(const RadialProfile& f, const RadialProfile& g) {
  return -cell_form(f, g, lambda_cell_weights(f.grid));
}

Complex kinetic_form(const RadialProfile& f, const RadialProfile& g) {
  return cell_form(f, g, kinetic_cell_weights(f.grid));
}

std::vector<double> default_excision_ladder(const RadialGrid& grid) {
  std::vector<double> eps;
  for (int k = 0; k <= 6; ++k) eps.push_back(grid.r_max() * std::ldexp(0.1, -k));
  return eps;
}

namespace {

// Records |d_k| / |d_{k+1}|; false at the first ratio under min_contraction.
bool contracts(const std::vector<Complex>& v, double min_contraction,
               double noise_floor, std::vector<double>& ratios,
               std::size_t& failed_step, double& failed_ratio) {
  ratios.clear();
  for (std::size_t k = 0; k + 2 < v.size(); ++k) {
    const double d0 = std::abs(v[k + 1] - v[k]);
    const double d1 = std::abs(v[k + 2] - v[k + 1]);
    if (d0 <= noise_floor || d1 <= noise_floor) {
      ratios.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    ratios.push_back(d0 / d1);
    if (d0 / d1 < min_contraction) {
      failed_step = k + 1;
      failed_ratio = d0 / d1;
      return false;
    }
  }
  return true;
}

}  // namespace

ExtrapolationResult richardson_to_zero(std::vector<double> radii,
                                       std::vector<Complex> values,
                                       double min_contraction,
                                       double noise_floor) {
  if (radii.size() != values.size() || radii.size() < 2) {
    throw SizingError("richardson: need at least two samples");
  }
  ExtrapolationResult result;
  std::size_t step = 0;
  double ratio = 0.0;
  if (!contracts(values, min_contraction, noise_floor, result.contraction, step, ratio)) {
    std::vector<Complex> eliminated;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      eliminated.push_back((radii[k + 1] * values[k] - radii[k] * values[k + 1]) /
                           (radii[k + 1] - radii[k]));
    }
    std::size_t step1 = 0;
    double ratio1 = 0.0;
    if (eliminated.size() < 3 ||
        !contracts(eliminated, min_contraction, noise_floor, result.contraction, step1, ratio1)) {
      std::ostringstream msg;
      msg << "excision ladder does not contract at step " << step
          << " (ratio " << ratio << " < " << min_contraction << ")";
      throw ExtrapolationError(msg.str());
    }
    result.level = 1;
  }
  // Neville's scheme evaluated at eps = 0.
  std::vector<Complex> p = values;
  const std::size_t n = radii.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double a = radii[i];
      const double b = radii[i + level];
      p[i] = (b * p[i] - a * p[i + 1]) / (b - a);
    }
  }
  result.value = p[0];
  result.radii = std::move(radii);
  result.estimates = std::move(values);
  return result;
}

ExtrapolationResult discrete_asymmetry_detailed(const RadialProfile& f,
                                                const RadialProfile& g) {
  require_same_grid(f, g);
  for (const auto* p : {&f, &g}) {
    for (const auto& v : p->values) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw SizingError("discrete asymmetry: non-finite profile sample");
      }
    }
  }
  const auto& grid = f.grid;
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double h2 = h * h;

  // (Lambda g)_j r_j^2 reduces to the plain second difference.
  auto second_diff = [&](const std::vector<Complex>& v, std::size_t j) {
    if (j + 1 == n) return (v[j] - 2.0 * v[j - 1] + v[j - 2]) / h2;
    return (v[j + 1] - 2.0 * v[j] + v[j - 1]) / h2;
  };

  std::vector<double> radii;
  std::vector<Complex> estimates;
  double scale = 0.0;
  for (double eps : default_excision_ladder(grid)) {
    auto first = static_cast<std::size_t>(std::ceil(eps / h - 1e-9));
    first = std::max<std::size_t>(first, 1);
    if (first + 2 >= n) continue;
    const auto w = simpson_on_range(n - first, h);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = first; j < n; ++j) {
      const auto a = conj_mul(f.values[j], second_diff(g.values, j));
      const auto b = conj_mul(second_diff(f.values, j), g.values[j]);
      re += w[j - first] * (a.re - b.re);
      im += w[j - first] * (a.im - b.im);
    }
    const Complex value = kFourPi * Complex(re, im);
    scale = std::max(scale, std::abs(value));
    if (!radii.empty() && grid.node(first) == radii.back()) continue;
    radii.push_back(grid.node(first));
    estimates.push_back(value);
  }
  if (radii.size() < 2) {
    throw ExtrapolationError("discrete asymmetry: grid too coarse for ladder");
  }
  const double noise = 1e-11 * std::max(scale, 1.0);
  return richardson_to_zero(std::move(radii), std::move(estimates), 1.5, noise);
}

Complex discrete_asymmetry(const RadialProfile& f, const RadialProfile& g) {
  return discrete_asymmetry_detailed(f, g).value;
}

bool has_compact_support(const RadialProfile& f, double tol) {
  double peak = 0.0;
  for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
  return std::abs(f.values.back()) <= tol * peak;
}

void write_profile_csv(std::ostream& out, const RadialProfile& f) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf.precision(17);
  buf << "r,re,im\n";
  for (std::size_t j = 0; j < f.size(); ++j) {
    buf << f.grid.node(j) << ',' << f.values[j].real() << ','
        << f.values[j].imag() << '\n';
  }
  out << buf.str();
}

}  // namespace intop
