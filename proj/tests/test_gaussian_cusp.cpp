#include <cmath>
#include <random>

#include "doctest.h"
#include "intop/errors.hpp"
#include "intop/gaussian_cusp.hpp"
#include "intop/quadrature.hpp"

using namespace intop;

namespace {

// Independent angular product rule, pole along z.
Complex brute_average(const GaussianCuspFunction& f, const Vec3& y, double r) {
  const auto& gl = gauss_legendre(200);
  const int n_phi = 200;
  Complex acc = 0.0;
  for (std::size_t t = 0; t < gl.nodes.size(); ++t) {
    const double ct = gl.nodes[t];
    const double st = std::sqrt(1.0 - ct * ct);
    for (int p = 0; p < n_phi; ++p) {
      const double ph = 2.0 * kPi * p / n_phi;
      const Vec3 x = y + r * Vec3(st * std::cos(ph), st * std::sin(ph), ct);
      acc += gl.weights[t] * f.value(x);
    }
  }
  return acc / (2.0 * n_phi);
}

GaussianCuspFunction random_function(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::uniform_real_distribution<double> u(0.4, 1.6);
  GaussianCuspFunction f;
  for (int k = 0; k < 2; ++k) {
    f.smooth_terms.push_back({{d(rng), d(rng)}, u(rng), Vec3(d(rng), d(rng), d(rng))});
    f.cusp_terms.push_back({Vec3(d(rng), d(rng), d(rng)), {d(rng), d(rng)}, u(rng)});
  }
  return f;
}

}  // namespace

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 12, 31}) {
    const auto& gl = gauss_legendre(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double acc = 0.0;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) acc += gl.weights[k] * std::pow(gl.nodes[k], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), ParameterError);
}

TEST_CASE("sphere_average closed forms") {
  GaussianCuspFunction g;
  g.smooth_terms.push_back({1.0, 1.0, Vec3::Zero()});
  const Complex v = sphere_average(g, Vec3(0, 0, 1), 1.0);
  CHECK(v.real() == doctest::Approx(std::exp(-2.0) * std::sinh(2.0) / 2.0).epsilon(1e-14));
  CHECK(v.real() == doctest::Approx(0.245421).epsilon(1e-6));
  for (double r : {0.0, 0.3, 1.7}) {
    CHECK(sphere_average(g, Vec3::Zero(), r).real() == doctest::Approx(std::exp(-r * r)).epsilon(1e-15));
  }
  // Odd part about its own center.
  GaussianCuspFunction odd;
  const Vec3 c(0.2, -0.4, 0.9);
  odd.smooth_terms.push_back({1.0, 0.8, c + Vec3(0.3, 0, 0)});
  odd.smooth_terms.push_back({-1.0, 0.8, c - Vec3(0.3, 0, 0)});
  for (double r : {0.05, 0.5, 2.0}) CHECK(std::abs(sphere_average(odd, c, r)) < 1e-16);
}

TEST_CASE("sphere_average matches brute angular quadrature") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 6; ++trial) {
    auto f = random_function(rng);
    const Vec3 y(d(rng), d(rng), d(rng));
    for (double r : {0.0, 0.01, 0.2, 0.7, 1.3, 2.5, 4.0}) {
      const Complex a = sphere_average(f, y, r);
      const Complex b = r == 0.0 ? f.value(y) : brute_average(f, y, r);
      CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)));
    }
    // Continuity toward the point value.
    CHECK(std::abs(sphere_average(f, y, 1e-7) - f.value(y)) < 1e-6);
  }
}

TEST_CASE("sphere average jets agree with finite differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 6; ++trial) {
    auto f = random_function(rng);
    const Vec3 y = trial % 2 == 0 ? f.cusp_terms[0].center : Vec3(d(rng), d(rng), d(rng));
    for (double r : {0.05, 0.4, 1.1, 2.2}) {
      const double h = 1e-4;
      const auto j = f.sphere_average_jet(y, r);
      const auto p = f.sphere_average_jet(y, r + h).v;
      const auto m = f.sphere_average_jet(y, r - h).v;
      CHECK(std::abs(j.d1 - (p - m) / (2 * h)) < 1e-6);
      CHECK(std::abs(j.d2 - (p - 2.0 * j.v + m) / (h * h)) < 1e-4);
    }
  }
}

TEST_CASE("laplacian against finite differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d;
  auto f = random_function(rng);
  for (int k = 0; k < 10; ++k) {
    const Vec3 x(d(rng), d(rng), d(rng));
    const double h = 1e-3;
    Complex fd = -6.0 * f.value(x);
    for (int a = 0; a < 3; ++a) {
      Vec3 e = Vec3::Zero();
      e[a] = h;
      fd += f.value(x + e) + f.value(x - e);
    }
    fd /= h * h;
    CHECK(std::abs(f.laplacian(x) - fd) < 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("boundary_data_3d") {
  GaussianCuspFunction f;
  const Vec3 y(0.5, 0.0, -0.2);
  f.cusp_terms.push_back({y, 2.0, 0.7});
  f.smooth_terms.push_back({Complex(0.3, 0.1), 1.2, Vec3(1, 1, 0)});
  auto bd = boundary_data_3d(f, y);
  CHECK(bd.deriv_c == Complex(8.0 * kPi));
  CHECK(std::abs(bd.value_b - f.smooth_terms[0].amplitude * std::exp(-1.2 * (Vec3(1, 1, 0) - y).squaredNorm())) < 1e-15);
  GaussianCuspFunction smooth;
  smooth.smooth_terms.push_back({1.0, 1.0, Vec3::Zero()});
  CHECK(boundary_data_3d(smooth, Vec3(0.1, 0.2, 0.3)).deriv_c == Complex(0.0));
  GaussianCuspFunction elsewhere;
  elsewhere.cusp_terms.push_back({Vec3(1, 0, 0), 3.0, 1.0});
  CHECK(boundary_data_3d(elsewhere, Vec3::Zero()).deriv_c == Complex(0.0));
  // The radial derivative of the average reproduces the C datum.
  auto full = f;
  full.cusp_terms.push_back({Vec3(2, 0, 0), 1.5, 1.0});
  CHECK(std::abs(kFourPi * full.sphere_average_jet(y, 0.0).d1 - boundary_data_3d(full, y).deriv_c) < 1e-12);
}

TEST_CASE("invalid terms are rejected") {
  GaussianCuspFunction f;
  f.smooth_terms.push_back({1.0, -1.0, Vec3::Zero()});
  CHECK_THROWS_AS(f.validate(), ParameterError);
}

TEST_CASE("spherical quadrature") {
  QuadratureSpec spec;
  GaussianCuspFunction g;
  g.smooth_terms.push_back({1.0, 1.0, Vec3(0.3, 0.1, 0)});
  const Integrand f = [&](const Vec3& x) { return g.value(x); };
  const double exact = std::pow(kPi, 1.5);
  CHECK(std::abs(integrate({Vec3::Zero()}, f, spec, 0.0) - exact) < 1e-10);
  const std::vector<Vec3> two = {Vec3::Zero(), Vec3(0, 0, 1.2)};
  CHECK(std::abs(integrate(two, f, spec, 0.0) - exact) < 1e-8);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  const std::vector<Vec3> three = {Vec3::Zero(), Vec3(1, 0, 0), Vec3(0, 1.5, 0.2)};
  for (int k = 0; k < 20; ++k) {
    const Vec3 x(d(rng), d(rng), d(rng));
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) sum += becke_weight(three, c, x);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Thread count does not change the result.
  auto threaded = spec;
  threaded.threads = 4;
  CHECK(integrate(two, f, spec, 0.01) == integrate(two, f, threaded, 0.01));
}

TEST_CASE("excised integral of a 1/r^2 integrand") {
  // int exp(-r^2)/r^2 d^3x = 4 pi * sqrt(pi)/2
  QuadratureSpec spec;
  const Integrand f = [](const Vec3& x) { return Complex(std::exp(-x.squaredNorm()) / x.squaredNorm()); };
  auto res = excised_integral({Vec3::Zero()}, f, spec);
  CHECK(std::abs(res.value - 2.0 * kPi * std::sqrt(kPi)) < 1e-9);
  for (double c : res.contraction) CHECK(c >= 1.5);
  QuadratureSpec bad;
  bad.r_split = 1.0;
  CHECK_THROWS_AS(integrate({Vec3::Zero(), Vec3(1, 0, 0)}, f, bad, 0.0), ParameterError);
}
