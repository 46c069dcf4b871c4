#include <cmath>
#include <sstream>

#include "doctest.h"
#include "intop/errors.hpp"
#include "intop/identities.hpp"
#include "oracles.hpp"

using namespace intop;

namespace {

const double k4Pi = 4.0 * oracle::kPi;

GaussianCuspFunction gaussian(Complex a, double w, Vec3 c) {
  GaussianCuspFunction f;
  f.smooth_terms.push_back({a, w, c});
  return f;
}

GaussianCuspFunction with_cusp(GaussianCuspFunction f, Vec3 c, Complex b, double w) {
  f.cusp_terms.push_back({c, b, w});
  return f;
}

// Radial mean of exp(-|x|^2) over the sphere of radius r about a point at distance d.
double gaussian_mean(double d, double r) {
  return (std::exp(-(r - d) * (r - d)) - std::exp(-(r + d) * (r + d))) / (4.0 * d * r);
}

QuadratureSpec quad() {
  QuadratureSpec q;
  q.threads = 4;
  return q;
}

}  // namespace

TEST_CASE("grade") {
  ReportRow row{"x", "s", Complex(1.0 + 1e-6), Complex(1.0), 0, 0, 1e-5, true, false, ""};
  grade(row);
  CHECK(row.pass);
  CHECK(row.rel_err == doctest::Approx(1e-6).epsilon(1e-6));
  row.lhs = 1.1;
  grade(row);
  CHECK_FALSE(row.pass);
  row.lhs = Complex(NAN, 0.0);
  grade(row);
  CHECK_FALSE(row.pass);
  ReportRow zero{"x", "s", Complex(5e-5), Complex(0.0), 0, 0, 1e-4, false, false, ""};
  grade(zero);
  CHECK(zero.pass);
  CHECK(zero.abs_err == 5e-5);
}

TEST_CASE("scene validation") {
  CHECK_THROWS_AS((SceneConfig{{}, {}}.validate()), ParameterError);
  CHECK_THROWS_AS((SceneConfig{{Vec3::Zero()}, {2}}.validate()), ParameterError);
  CHECK_THROWS_AS((SceneConfig{{Vec3::Zero(), Vec3::Zero()}, {1, 1}}.validate()), ParameterError);
  CHECK_THROWS_AS((SceneConfig{{Vec3::Zero()}, {1, -1}}.validate()), ParameterError);
  CHECK(SceneConfig{{Vec3(1, 0, 0)}, {-1}}.describe() == "p=1 y1=(1 0 0) q1=-1");
}

TEST_CASE("m identity examples") {
  const Vec3 y(0.1, -0.2, 0.05);
  const SceneConfig scene{{y}, {1}};
  SUBCASE("slopes (1, 0) with unit point values give 4 pi") {
    auto phi = with_cusp(gaussian(1.0, 0.9, y), y, 1.0, 1.2);
    auto psi = gaussian(1.0, 1.3, y);
    CHECK(std::abs(m_boundary_pairing(phi, psi, scene) - k4Pi) < 1e-12);
    auto row = verify_m_identity(phi, psi, scene, quad());
    CHECK(row.pass);
    CHECK(std::abs(row.lhs - k4Pi) / k4Pi < 1e-5);
  }
  SUBCASE("phi = psi") {
    auto phi = with_cusp(gaussian(0.7, 1.1, y + Vec3(0.4, 0, 0)), y, -0.8, 1.0);
    CHECK(std::abs(m_bracket(phi, phi, scene, quad())) < 1e-8);
  }
  SUBCASE("cuspless functions") {
    auto phi = gaussian(Complex(1.0, 0.4), 1.0, y + Vec3(0, 0.5, 0));
    auto psi = gaussian(Complex(-0.3, 1.0), 0.7, y + Vec3(0.3, 0, 0.4));
    const SceneConfig two{{y, y + Vec3(0, 0, 1.3)}, {1, -1}};
    CHECK(std::abs(m_boundary_pairing(phi, psi, two)) == 0.0);
    CHECK(std::abs(m_bracket(phi, psi, two, quad())) < 1e-8);
  }
  SUBCASE("antisymmetry") {
    const SceneConfig two{{y, y + Vec3(0.9, 0.6, 0)}, {1, 1}};
    auto phi = with_cusp(with_cusp(gaussian(Complex(1, 0.5), 1.0, y + Vec3(0.4, 0, 0)), y,
                                   Complex(0.3, -1), 1.4),
                         two.fermion_centers[1], 0.5, 0.8);
    auto psi = with_cusp(gaussian(Complex(-0.2, 0.7), 0.8, y + Vec3(0, 0.45, 0.1)),
                         two.fermion_centers[1], Complex(1, 1), 1.1);
    const Complex ab = m_bracket(phi, psi, two, quad());
    const Complex ba = m_bracket(psi, phi, two, quad());
    CHECK(std::abs(ab + std::conj(ba)) <= 1e-12 * std::abs(ab));
    auto row = verify_m_identity(phi, psi, two, quad());
    CHECK(row.pass);
  }
  SUBCASE("three centers are rejected") {
    const SceneConfig three{{Vec3::Zero(), Vec3(2, 0, 0), Vec3(0, 2, 0)}, {1, 1, 1}};
    CHECK_THROWS_AS(verify_m_identity(gaussian(1, 1, {}), gaussian(1, 1, {}), three, quad()),
                    ParameterError);
  }
}

TEST_CASE("laplacian symmetry on smooth functions") {
  auto phi = gaussian(Complex(1.0, -0.5), 0.9, Vec3(0.2, 0, 0));
  auto psi = gaussian(Complex(0.4, 0.8), 1.3, Vec3(-0.1, 0.3, 0));
  auto row = verify_laplacian_symmetry(phi, psi, SceneConfig{{Vec3::Zero()}, {1}}, quad());
  CHECK(row.pass);
  CHECK(row.abs_err < 1e-8);
}

TEST_CASE("v cross-term") {
  const Vec3 yh = Vec3::Zero();
  const Vec3 yk(0, 0, 1);
  const auto g = gaussian(1.0, 1.0, Vec3::Zero());
  SUBCASE("gaussian example") {
    const double printed = k4Pi * (std::exp(-2.0) - 1.0);
    CHECK(printed == doctest::Approx(-10.8657).epsilon(1e-5));
    CHECK(std::abs(v_closed_form_printed(g, g, yh, yk) - printed) < 1e-12);
    // Sphere projection about each center replaces the far point value.
    const double projected = k4Pi * (std::exp(-2.0) - gaussian_mean(1.0, 1.0));
    CHECK(projected == doctest::Approx(-1.38338).epsilon(1e-5));
    const Complex q = v_bracket(g, g, yh, yk, quad());
    CHECK(std::abs(q - projected) < 1e-8);
    CHECK(std::abs(v_closed_form_projected(g, g, yh, yk) - projected) < 1e-12);

    auto rows = verify_v_crossterm(g, g, SceneConfig{{yh, yk}, {1, 1}}, quad());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].identity == "v_closed_form");
    CHECK_FALSE(rows[0].pass);
    CHECK(rows[1].identity == "v_cancellation");
    CHECK(rows[1].pass);
  }
  SUBCASE("reflection symmetric functions give zero") {
    const Vec3 mid = 0.5 * (yh + yk);
    auto f = gaussian(1.0, 0.8, mid + Vec3(0.3, 0, 0));
    f.smooth_terms.push_back({0.5, 1.2, mid + Vec3(0, 0.2, 0)});
    CHECK(std::abs(v_closed_form_printed(f, f, yh, yk)) < 1e-14);
    CHECK(std::abs(v_bracket(f, f, yh, yk, quad())) < 1e-8);
  }
  SUBCASE("charge pattern flips the cross-term") {
    auto phi = gaussian(Complex(1.0, 0.3), 0.9, Vec3(0.3, 0.1, 0.2));
    auto psi = gaussian(Complex(-0.4, 0.9), 1.2, Vec3(-0.2, 0.3, 0.7));
    auto same = verify_v_crossterm(phi, psi, SceneConfig{{yh, yk}, {1, 1}}, quad());
    auto flip = verify_v_crossterm(phi, psi, SceneConfig{{yh, yk}, {1, -1}}, quad());
    CHECK(std::abs(same[1].lhs + flip[1].lhs) < 1e-12);
    CHECK(std::abs(same[0].lhs - flip[0].lhs) == 0.0);
    // The symmetrized sum follows the projected closed forms.
    const Complex predicted = v_closed_form_projected(phi, psi, yh, yk) +
                              v_closed_form_projected(phi, psi, yk, yh);
    CHECK(std::abs(same[1].lhs - predicted) < 1e-8);
  }
  SUBCASE("requires two centers") {
    CHECK_THROWS_AS(verify_v_crossterm(g, g, SceneConfig{{yh}, {1}}, quad()), ParameterError);
  }
}

TEST_CASE("gaussian overlap") {
  auto a = gaussian(Complex(1, 1), 0.7, Vec3(0.1, 0, 0));
  auto b = gaussian(Complex(0.5, -2), 1.4, Vec3(0, 0.4, -0.3));
  const double s = 2.1;
  const Complex expected = Complex(1, -1) * Complex(0.5, -2) * std::pow(oracle::kPi / s, 1.5) *
                           std::exp(-0.7 * 1.4 / s * (0.01 + 0.16 + 0.09));
  CHECK(std::abs(gaussian_overlap(a, b) - expected) < 1e-14);
  CHECK_THROWS_AS(gaussian_overlap(with_cusp(a, {}, 1.0, 1.0), b), ParameterError);
}

TEST_CASE("sigma identity") {
  const PairTestFunction base{gaussian(Complex(1.0, 0.2), 0.8, Vec3(0.1, 0.2, 0)), {}};
  SUBCASE("relative slopes (1, 0) give 4 pi times the overlap") {
    PairTestFunction phi = base;
    phi.rel = with_cusp(gaussian(1.0, 1.1, Vec3::Zero()), Vec3::Zero(), 1.0, 1.0);
    PairTestFunction psi{gaussian(Complex(0.5, -0.4), 1.2, Vec3(0, 0, 0.3)),
                         gaussian(1.0, 0.9, Vec3::Zero())};
    auto row = verify_sigma_identity(phi, psi, quad());
    CHECK(std::abs(row.rhs - k4Pi * gaussian_overlap(phi.cm, psi.cm)) < 1e-12);
    CHECK(row.pass);
  }
  SUBCASE("phi = psi and cuspless parts") {
    PairTestFunction phi = base;
    phi.rel = with_cusp(gaussian(0.6, 1.0, Vec3(0.3, 0, 0)), Vec3::Zero(), 1.5, 1.2);
    CHECK(std::abs(verify_sigma_identity(phi, phi, quad()).lhs) < 1e-8);
    PairTestFunction smooth = base;
    smooth.rel = gaussian(Complex(0, 1), 1.0, Vec3(0, 0.4, 0));
    PairTestFunction other{gaussian(0.3, 1.4, Vec3(0.2, 0, 0)), gaussian(1.0, 0.7, Vec3(0.35, 0, 0))};
    auto row = verify_sigma_identity(smooth, other, quad());
    CHECK(std::abs(row.rhs) == 0.0);
    CHECK(std::abs(row.lhs) < 1e-8);
  }
}

TEST_CASE("run_suite") {
  SUBCASE("empty battery") {
    SuiteConfig c;
    c.n_scenes = 0;
    auto r = run_suite(c);
    CHECK(r.rows.empty());
    CHECK(r.passed());
  }
  SUBCASE("identity selection") {
    SuiteConfig c;
    c.n_scenes = 2;
    c.identities = {"laplacian_symmetry"};
    auto r = run_suite(c);
    CHECK(r.rows.size() == 2);
    for (const auto& row : r.rows) CHECK(row.identity == "laplacian_symmetry");
    c.identities = {"unknown"};
    CHECK_THROWS_AS(run_suite(c), ParameterError);
  }
  SuiteConfig c;
  c.n_scenes = 4;
  c.quad.threads = 2;
  auto r = run_suite(c);
  SUBCASE("rows by identity") {
    for (const auto& row : r.rows) {
      if (row.identity.rfind("v_", 0) == 0) continue;
      CHECK_MESSAGE(row.pass, row.identity << " " << row.scene << " " << row.rel_err);
    }
    std::size_t v = 0;
    for (const auto& row : r.rows) v += row.identity.rfind("v_", 0) == 0;
    CHECK(v == 4);
  }
  SUBCASE("deterministic given seed") {
    auto again = run_suite(c);
    REQUIRE(again.rows.size() == r.rows.size());
    std::ostringstream a, b;
    write_report_csv(a, r);
    write_report_csv(b, again);
    CHECK(a.str() == b.str());
  }
  SUBCASE("self-test injection fails every row") {
    c.self_test = true;
    auto bad = run_suite(c);
    CHECK(bad.failures() == bad.rows.size());
  }
}

TEST_CASE("report csv") {
  VerificationReport r;
  r.rows.push_back({"m_identity", "a \"b\"", Complex(1, 2), Complex(1, 2), 0, 0, 1e-5, true, true, ""});
  std::ostringstream out;
  write_report_csv(out, r);
  const std::string s = out.str();
  CHECK(s.rfind("identity,scene,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,tolerance,pass,note\n", 0) == 0);
  CHECK(s.find("m_identity,\"a \"\"b\"\"\",1,2,1,2,0,0,") != std::string::npos);
  CHECK(s.find(",true,\"\"\n") != std::string::npos);
}
