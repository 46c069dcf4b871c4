#pragma once

// Analytic 3D test functions: Gaussian sums plus cusp terms
// b |x - y| exp(-beta |x - y|^2), with closed-form sphere averages.

#include <Eigen/Dense>
#include <vector>

#include "intop/jet.hpp"
#include "intop/radial.hpp"

namespace intop {

using Vec3 = Eigen::Vector3d;

struct SmoothTerm {
  Complex amplitude;
  double width;  // alpha in exp(-alpha |x - c|^2)
  Vec3 center;
};

struct CuspTerm {
  Vec3 center;
  Complex slope;  // b
  double width;   // beta
};

struct GaussianCuspFunction {
  std::vector<SmoothTerm> smooth_terms;
  std::vector<CuspTerm> cusp_terms;

  /// Throws ParameterError on non-positive widths or non-finite data.
  void validate() const;

  Complex value(const Vec3& x) const;
  /// Pointwise Laplacian; cusp terms contribute 2b/s e^{...} + ..., singular
  /// at their centers.
  Complex laplacian(const Vec3& x) const;
  /// Sphere average about y as a jet in the radius r >= 0.
  ComplexJet sphere_average_jet(const Vec3& y, double r) const;
};

/// Average of fn over the sphere of radius r about center; r = 0 gives the
/// point value.
Complex sphere_average(const GaussianCuspFunction& fn, const Vec3& center,
                       double r);

/// (fn(center), 4 pi * sum of cusp slopes located at center).
BoundaryData boundary_data_3d(const GaussianCuspFunction& fn,
                              const Vec3& center);

/// Centers closer than this are treated as coincident.
inline constexpr double kCenterTolerance = 1e-12;

}  // namespace intop
