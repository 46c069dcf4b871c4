#include "intop/gaussian_cusp.hpp"

#include <cmath>

#include "intop/errors.hpp"
#include "intop/quadrature.hpp"

namespace intop {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }
bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

// exp(-a(r^2 + d^2)) sinh(2ard) / (2ard) for d > 0.
Jet2 gaussian_average(double alpha, double d, double r) {
  const Jet2 rj = Jet2::variable(r);
  const double x = 2.0 * alpha * r * d;
  if (x < 0.1) {
    const Jet2 xx = (2.0 * alpha * d) * (2.0 * alpha * d) * (rj * rj);
    // sinh(x)/x as a series in x^2.
    Jet2 s = Jet2::constant(1.0 / 39916800.0);
    for (double c : {1.0 / 362880.0, 1.0 / 5040.0, 1.0 / 120.0, 1.0 / 6.0, 1.0}) {
      s = s * xx + c;
    }
    return exp(-alpha * (rj * rj) - alpha * d * d) * s;
  }
  const Jet2 minus = rj - d;
  const Jet2 plus = rj + d;
  return (exp(-alpha * (minus * minus)) - exp(-alpha * (plus * plus))) /
         ((4.0 * alpha * d) * rj);
}

// P(s) = int_0^s u^2 exp(-beta u^2) du, odd in s.
Jet2 cusp_primitive(double beta, Jet2 s) {
  const double e = std::exp(-beta * s.v * s.v);
  const double p = -s.v * e / (2.0 * beta) +
                   std::sqrt(kPi) / (4.0 * beta * std::sqrt(beta)) *
                       std::erf(std::sqrt(beta) * s.v);
  const double dp = s.v * s.v * e;
  const double d2p = (2.0 * s.v - 2.0 * beta * s.v * s.v * s.v) * e;
  return compose(s, p, dp, d2p);
}

// Average of s exp(-beta s^2), s = |x - c|, over the sphere of radius r
// about a point at distance d > 0 from c.
Jet2 cusp_average(double beta, double d, double r) {
  const Jet2 rj = Jet2::variable(r);
  if (r >= 0.5 * d) {
    // P(|r - d|) = sgn(r - d) P(r - d); the average has a kink at r = d.
    const double sgn = r >= d ? 1.0 : -1.0;
    return (cusp_primitive(beta, rj + d) - sgn * cusp_primitive(beta, rj - d)) /
           ((2.0 * d) * rj);
  }
  // (1 / 2d) int_{-1}^{1} s F(s) dt with s = d + r t.
  const auto& gl = gauss_legendre(24);
  Jet2 acc;
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    const Jet2 s = rj * gl.nodes[k] + d;
    acc = acc + gl.weights[k] * (s * s * exp(-beta * (s * s)));
  }
  return acc / (2.0 * d);
}

}  // namespace

void GaussianCuspFunction::validate() const {
  for (const auto& t : smooth_terms) {
    if (!(t.width > 0.0) || !std::isfinite(t.width) || !finite(t.center) ||
        !finite(t.amplitude)) {
      throw ParameterError("gaussian term needs a positive width and finite data");
    }
  }
  for (const auto& t : cusp_terms) {
    if (!(t.width > 0.0) || !std::isfinite(t.width) || !finite(t.center) ||
        !finite(t.slope)) {
      throw ParameterError("cusp term needs a positive width and finite data");
    }
  }
}

Complex GaussianCuspFunction::value(const Vec3& x) const {
  Complex v = 0.0;
  for (const auto& t : smooth_terms) {
    v += t.amplitude * std::exp(-t.width * (x - t.center).squaredNorm());
  }
  for (const auto& t : cusp_terms) {
    const double s = (x - t.center).norm();
    v += t.slope * (s * std::exp(-t.width * s * s));
  }
  return v;
}

Complex GaussianCuspFunction::laplacian(const Vec3& x) const {
  Complex v = 0.0;
  for (const auto& t : smooth_terms) {
    const double s2 = (x - t.center).squaredNorm();
    const double a = t.width;
    v += t.amplitude * ((4.0 * a * a * s2 - 6.0 * a) * std::exp(-a * s2));
  }
  for (const auto& t : cusp_terms) {
    const double s = (x - t.center).norm();
    const double b = t.width;
    v += t.slope *
         ((2.0 / s - 10.0 * b * s + 4.0 * b * b * s * s * s) * std::exp(-b * s * s));
  }
  return v;
}

ComplexJet GaussianCuspFunction::sphere_average_jet(const Vec3& y,
                                                    double r) const {
  if (!(r >= 0.0)) throw ParameterError("sphere average: radius must be >= 0");
  ComplexJet out;
  for (const auto& t : smooth_terms) {
    const double d = (y - t.center).norm();
    if (d <= kCenterTolerance) {
      const Jet2 rj = Jet2::variable(r);
      out.add(t.amplitude, exp(-t.width * (rj * rj)));
    } else {
      out.add(t.amplitude, gaussian_average(t.width, d, r));
    }
  }
  for (const auto& t : cusp_terms) {
    const double d = (y - t.center).norm();
    if (d <= kCenterTolerance) {
      const Jet2 rj = Jet2::variable(r);
      out.add(t.slope, rj * exp(-t.width * (rj * rj)));
    } else {
      out.add(t.slope, cusp_average(t.width, d, r));
    }
  }
  return out;
}

Complex sphere_average(const GaussianCuspFunction& fn, const Vec3& center,
                       double r) {
  return fn.sphere_average_jet(center, r).v;
}

BoundaryData boundary_data_3d(const GaussianCuspFunction& fn,
                              const Vec3& center) {
  Complex slope = 0.0;
  for (const auto& t : fn.cusp_terms) {
    if ((t.center - center).norm() <= kCenterTolerance) slope += t.slope;
  }
  return {fn.value(center), kFourPi * slope};
}

}  // namespace intop
