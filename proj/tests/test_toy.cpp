#include <cmath>
#include <random>

#include "doctest.h"
#include "intop/errors.hpp"
#include "intop/toy_model.hpp"

using namespace intop;

namespace {

ToyParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ToyParams p;
  p.mass_m = 0.3 + 2.0 * u(rng);
  p.energy_e = 2.0 * u(rng);
  p.coupling_g = 0.1 + 3.0 * u(rng);
  p.lambda_scale = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + 5.0 * u(rng));
  p.point_coupling_mu = u(rng);
  return p;
}

Eigen::VectorXcd random_vector(std::int64_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::VectorXcd x(n);
  for (std::int64_t i = 0; i < n; ++i) x[i] = {d(rng), d(rng)};
  return x;
}

double lowest(std::size_t n_nodes) {
  ToyParams p;
  p.energy_e = 0.5;
  auto sys = assemble(p, make_grid(8.0, n_nodes));
  return lowest_eigenpairs(sys, 1)[0].eigenvalue;
}

}  // namespace

TEST_CASE("constraint_embed") {
  auto g = make_grid(6.0, 61);
  ToyParams p;
  auto f = RadialProfile::sample(g, [](double r) { return Complex((1 + r * r) * std::exp(-r * r)); });
  auto s = constraint_embed(f, p);
  CHECK(s.amplitude_c == Complex(1.0));
  CHECK(constraint_residual(s, p) == 0.0);

  CHECK(constraint_embed(RadialProfile(g), p).amplitude_c == Complex(0.0));

  ToyParams q;
  q.lambda_scale = 2.0 * std::sqrt(kFourPi);
  auto two = RadialProfile::sample(g, [](double r) { return Complex(2.0 * std::exp(-r * r)); });
  CHECK(constraint_embed(two, q).amplitude_c.real() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  auto g = make_grid(5.0, 41);
  ToyParams p;
  p.energy_e = -1.0;
  CHECK_THROWS_AS(assemble(p, g), ParameterError);
  p = {};
  p.coupling_g = 0.0;
  CHECK_THROWS_AS(assemble(p, g), ParameterError);
  p = {};
  p.lambda_scale = 0.0;
  CHECK_THROWS_AS(assemble(p, g), ParameterError);
  p = {};
  p.mass_m = 0.0;
  CHECK_THROWS_AS(assemble(p, g), ParameterError);
}

TEST_CASE("assembly is exactly Hermitian and positive") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_params(rng);
    auto sys = assemble(p, make_grid(4.0 + trial, 24 + 3 * trial));
    CHECK(hermiticity_defect(sys.pencil.hamiltonian) == 0.0);
    CHECK(hermiticity_defect(sys.pencil.mass_matrix) == 0.0);
    auto eig = lowest_eigenpairs(sys, 1);
    CHECK(eig[0].eigenvalue >= -1e-10);
  }
  ToyParams p;
  auto sys = assemble(p, make_grid(10.0, 512));
  CHECK(lowest_eigenpairs(sys, 1)[0].eigenvalue >= -1e-10);
}

TEST_CASE("lambda block is negative and independent of lambda") {
  std::mt19937_64 rng(3);
  auto g = make_grid(6.0, 50);
  ToyParams p;
  auto sys = assemble(p, g);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_vector(sys.pencil.dim(), rng);
    CHECK(quadratic_form(sys.pencil.lambda_block, x) <= 1e-12);
  }
  ToyParams q = p;
  q.lambda_scale = -3.7;
  auto other = assemble(q, g);
  CHECK(hermiticity_defect(other.pencil.hamiltonian) == 0.0);
  // Same profile, expressed in both bases, gives the same g-part.
  auto f = RadialProfile::sample(g, [](double r) { return Complex((1 + 0.4 * r) * std::exp(-r * r)); });
  f.values.back() = 0.0;
  auto [x1, l1] = to_coefficients(sys, constraint_embed(f, p));
  auto [x2, l2] = to_coefficients(other, constraint_embed(f, q));
  CHECK(l1 == 0.0);
  CHECK(l2 == 0.0);
  CHECK(quadratic_form(sys.pencil.lambda_block, x1) ==
        doctest::Approx(quadratic_form(other.pencil.lambda_block, x2)).epsilon(1e-14));
  CHECK(quadratic_form(sys.pencil.lambda_block, x1) ==
        doctest::Approx(lambda_form(f, f).real()).epsilon(1e-13));
}

TEST_CASE("free limit") {
  ToyParams p;
  p.coupling_g = 1e-12;
  double prev = 1e300;
  for (double r_max : {4.0, 8.0, 16.0}) {
    auto sys = assemble(p, make_grid(r_max, static_cast<std::size_t>(20 * r_max) + 1));
    const double e = lowest_eigenpairs(sys, 1)[0].eigenvalue;
    CHECK(e > 0.0);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 0.03);
}

TEST_CASE("eigenpairs") {
  ToyParams p;
  p.energy_e = 0.3;
  auto sys = assemble(p, make_grid(8.0, 81));
  auto eig = lowest_eigenpairs(sys, 6);
  REQUIRE(eig.size() == 6);
  for (std::size_t i = 0; i + 1 < eig.size(); ++i) {
    CHECK(eig[i].eigenvalue <= eig[i + 1].eigenvalue);
  }
  for (std::size_t i = 0; i < eig.size(); ++i) {
    CHECK(constraint_residual(eig[i].state, p) < 1e-14);
    for (std::size_t j = 0; j < eig.size(); ++j) {
      auto [xi, li] = to_coefficients(sys, eig[i].state);
      auto [xj, lj] = to_coefficients(sys, eig[j].state);
      const Complex ip = xi.dot(sys.pencil.mass_matrix * xj);
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(lowest_eigenpairs(sys, 1000), SizingError);
}

TEST_CASE("lowest eigenvalue converges at second order") {
  const double a = lowest(65);
  const double b = lowest(129);
  const double c = lowest(257);
  const double order = std::log2((a - b) / (b - c));
  MESSAGE("observed order " << order);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("evolve conserves norm and is reversible") {
  ToyParams p;
  p.energy_e = 0.2;
  auto g = make_grid(8.0, 64);
  auto sys = assemble(p, g);
  auto f = RadialProfile::sample(g, [](double r) { return Complex(std::exp(-r * r), 0.3 * r * std::exp(-r * r)); });
  f.values.back() = 0.0;
  auto initial = constraint_embed(f, p);
  const double dt = default_time_step(g);
  auto fwd = evolve(sys, initial, dt, 10000);
  double drift = 0.0;
  for (double n : fwd.series.norms) drift = std::max(drift, std::abs(n - fwd.series.norms[0]));
  CHECK(drift <= 1e-10);
  CHECK(fwd.series.warnings.empty());
  auto back = evolve(sys, fwd.states.back(), -dt, 10000);
  auto [x0, l0] = to_coefficients(sys, initial);
  auto [x1, l1] = to_coefficients(sys, back.states.back());
  CHECK((x1 - x0).norm() / x0.norm() <= 1e-8);
}

TEST_CASE("projection loss is reported") {
  ToyParams p;
  auto g = make_grid(5.0, 41);
  auto sys = assemble(p, g);
  auto f = RadialProfile::sample(g, [](double r) { return Complex(std::exp(-r * r)); });
  ToyState bad{f, Complex(3.0)};
  auto traj = evolve(sys, bad, 0.01, 2);
  CHECK(traj.series.projection_loss < 1e-14);
  CHECK(traj.series.warnings.size() == 1);
  auto tail = RadialProfile::sample(g, [](double r) { return Complex(std::exp(-0.1 * r)); });
  traj = evolve(sys, constraint_embed(tail, p), 0.01, 2);
  CHECK(traj.series.projection_loss > 1e-6);
  CHECK(traj.series.warnings.size() == 1);
}

TEST_CASE("emission onset is quadratic") {
  ToyParams p;
  auto g = make_grid(8.0, 161);
  auto sys = assemble(p, g);
  auto init = pure_source_state(sys);
  CHECK(sector_probabilities(init).p_boson == 0.0);
  const double dt = 1e-3 / (50.0 * spectral_radius(sys.pencil));
  auto traj = evolve(sys, init, dt, 50);
  const auto& t = traj.series.times;
  const auto& pr = traj.series.sector_probabilities;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double x = std::log(t[k]);
    const double y = std::log(pr[k][1]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  MESSAGE("onset exponent " << slope);
  CHECK(std::abs(slope - 2.0) <= 0.1);
}

TEST_CASE("sector_probabilities") {
  auto g = make_grid(5.0, 41);
  auto split = sector_probabilities(ToyState{RadialProfile(g), Complex(1.0)});
  CHECK(split.p_boson == 0.0);
  CHECK(split.p_source == 1.0);
  auto f = RadialProfile::sample(g, [](double r) { return Complex(std::exp(-r * r)); });
  split = sector_probabilities(ToyState{f, Complex(0.0)});
  CHECK(split.p_boson == 1.0);
  CHECK(split.p_source == 0.0);
  CHECK_THROWS_AS(sector_probabilities(ToyState{RadialProfile(g), Complex(0.0)}), ParameterError);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  for (int k = 0; k < 50; ++k) {
    RadialProfile h(g);
    for (auto& v : h.values) v = {d(rng), d(rng)};
    split = sector_probabilities(ToyState{h, Complex(d(rng), d(rng))});
    CHECK(std::abs(split.p_boson + split.p_source - 1.0) <= 2e-16);
  }
}
