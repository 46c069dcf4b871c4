#pragma once

// Per-center spherical product quadrature with Becke partitioning and an
// excision ladder.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "intop/radial.hpp"

namespace intop {

using Vec3 = Eigen::Vector3d;

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

struct QuadratureSpec {
  /// Radius of every per-center grid.
  double r_outer = 9.0;
  /// Inner shell radius; must stay below half the smallest center distance.
  double r_split = 0.4;
  int radial_nodes = 20;  // per panel
  double panel_length = 0.75;
  int theta_nodes = 40;
  int phi_nodes = 24;
  std::vector<double> excision_ladder = {0.04, 0.02, 0.01, 0.005, 0.0025};
  int threads = 1;

  void validate(const std::vector<Vec3>& points) const;
};

using Integrand = std::function<Complex(const Vec3&)>;

/// Becke weight of center c at x (sums to 1 over centers).
double becke_weight(const std::vector<Vec3>& centers, std::size_t c,
                    const Vec3& x);

/// Integral of f over R^3 minus the eps-balls around every center, Becke
/// partitioned between the centers. Landmarks are further non-smooth points
/// of f: their distances become radial panel breaks and the angular pole of
/// each grid points at the nearest one.
Complex integrate(const std::vector<Vec3>& centers, const Integrand& f,
                  const QuadratureSpec& spec, double eps,
                  const std::vector<Vec3>& landmarks = {});

/// Integral over the excised domain for every ladder radius, extrapolated
/// to eps = 0.
ExtrapolationResult excised_integral(const std::vector<Vec3>& centers,
                                     const Integrand& f,
                                     const QuadratureSpec& spec,
                                     const std::vector<Vec3>& landmarks = {});

}  // namespace intop
