#pragma once

// Radial (l = 0) discretization: uniform grids on [0, r_max], sampled
// profiles phi(r) of radially symmetric wave functions psi(x) = phi(|x|),
// and the quadratic forms used by every reduced model.

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace intop {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

/// Uniform radial grid r_j = j * spacing, j = 0..n_nodes-1, with r_0 = 0 and
/// r_{n-1} = r_max exactly.
class RadialGrid {
 public:
  static constexpr std::size_t kMinNodes = 8;

  RadialGrid(double r_max, std::size_t n_nodes);

  double r_max() const { return r_max_; }
  std::size_t size() const { return n_nodes_; }
  double spacing() const { return spacing_; }
  double node(std::size_t j) const;
  std::vector<double> nodes() const;

  friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

 private:
  double r_max_;
  std::size_t n_nodes_;
  double spacing_;
};

RadialGrid make_grid(double r_max, std::size_t n_nodes);

/// Samples of phi(r) on a grid. Profile convention: values are phi, not
/// psi_00 = sqrt(4 pi) phi; every 4 pi factor is explicit in the operations.
struct RadialProfile {
  RadialGrid grid;
  std::vector<Complex> values;

  RadialProfile(RadialGrid g, std::vector<Complex> v);
  explicit RadialProfile(RadialGrid g);  // zero profile

  static RadialProfile sample(const RadialGrid& g,
                              const std::function<Complex(double)>& fn);

  std::size_t size() const { return values.size(); }
};

/// B and C data of a profile: value_b = phi(0), deriv_c = 4 pi phi'(0).
struct BoundaryData {
  Complex value_b;
  Complex deriv_c;
};

/// Composite Simpson weights (trapezoid on the last panel when the node
/// count is even).
std::vector<double> simpson_weights(const RadialGrid& grid);

/// Diagonal L2(R^3) weights 4 pi w_j r_j^2 of the radial pairing.
std::vector<double> mass_weights(const RadialGrid& grid);

/// Per-cell coefficients of the stiffness forms. kinetic: 4 pi times the
/// exact integral of r^2 over the cell divided by spacing^2; lambda: 4 pi /
/// spacing. Cell j joins nodes j and j+1.
std::vector<double> kinetic_cell_weights(const RadialGrid& grid);
std::vector<double> lambda_cell_weights(const RadialGrid& grid);

/// 4 pi \int f* g r^2 dr.
Complex inner_product(const RadialProfile& f, const RadialProfile& g);

/// phi''(r) / r^2. Interior nodes use the centered second difference; the
/// last node uses the one-sided backward difference and node 0 is filled by
/// quadratic extrapolation from nodes 1..3, which is only O(spacing)
/// accurate at the origin.
RadialProfile apply_lambda(const RadialProfile& f);

/// One-sided quadratic fit through nodes 0..2.
BoundaryData boundary_data(const RadialProfile& f);
BoundaryData boundary_data(std::span<const Complex> values, double spacing);

/// Constrained Lambda_s form: -4 pi \int f'* g' dr. Hermitian, <= 0 on the
/// diagonal.
Complex lambda_form(const RadialProfile& f, const RadialProfile& g);

/// <f | -Delta g> for radial functions: 4 pi \int f'* g' r^2 dr.
Complex kinetic_form(const RadialProfile& f, const RadialProfile& g);

/// Result of an excised Richardson extrapolation.
struct ExtrapolationResult {
  Complex value;
  std::vector<double> radii;        // effective excision radii (snapped)
  std::vector<Complex> estimates;   // raw excised values, one per radius
  std::vector<double> contraction;  // |d_k| / |d_{k+1}| at the accepted level
  int level = 0;                    // 0: raw samples, 1: after one elimination
};

/// Excision ladder eps_k = r_max 2^-k / 10, k = 0..6.
std::vector<double> default_excision_ladder(const RadialGrid& grid);

/// <f|Lambda g> - <Lambda f|g> over r >= eps, extrapolated to eps -> 0.
/// Approximates 4 pi (f'*(0) g(0) - f*(0) g'(0)).
ExtrapolationResult discrete_asymmetry_detailed(const RadialProfile& f,
                                                const RadialProfile& g);
Complex discrete_asymmetry(const RadialProfile& f, const RadialProfile& g);

/// Polynomial (Neville) extrapolation of samples y(eps_k) to eps = 0, which
/// is Richardson extrapolation with leading order 1 for arbitrary ratios.
/// Throws ExtrapolationError unless successive differences shrink by at
/// least min_contraction, either of the raw samples or of the samples with
/// the linear term eliminated (differences under noise_floor are exempt).
ExtrapolationResult richardson_to_zero(std::vector<double> radii,
                                       std::vector<Complex> values,
                                       double min_contraction = 1.5,
                                       double noise_floor = 0.0);

/// Numerical compact support: |phi(r_max)| <= tol * max |phi|.
bool has_compact_support(const RadialProfile& f, double tol = 1e-10);

/// Three-column CSV (r,re,im) with a header row.
void write_profile_csv(std::ostream& out, const RadialProfile& f);

}  // namespace intop
