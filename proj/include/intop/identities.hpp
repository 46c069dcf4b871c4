#pragma once

// Quadrature certification of the operator identities: excised brackets
// computed in 3D against closed forms built from boundary data.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "intop/gaussian_cusp.hpp"
#include "intop/quadrature.hpp"

namespace intop {

struct SceneConfig {
  std::vector<Vec3> fermion_centers;
  std::vector<int> charges;

  void validate() const;
  std::string describe() const;
};

struct ReportRow {
  std::string identity;
  std::string scene;
  Complex lhs;
  Complex rhs;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool relative = true;
  bool pass = false;
  std::string note;
};

/// Fills abs_err, rel_err and pass from lhs, rhs and tolerance.
void grade(ReportRow& row);

/// sum_k lim int_{R^3 \ B_eps} (phi* M_k psi - (M_k phi)* psi), with
/// M_k psi(x) = A''(r)/r^2, A the sphere average of psi about y_k and
/// r = |x - y_k|.
Complex m_bracket(const GaussianCuspFunction& phi,
                  const GaussianCuspFunction& psi, const SceneConfig& scene,
                  const QuadratureSpec& quad);

/// sum_k [C_k phi* B_k psi - B_k phi* C_k psi] from boundary_data_3d.
Complex m_boundary_pairing(const GaussianCuspFunction& phi,
                           const GaussianCuspFunction& psi,
                           const SceneConfig& scene);

/// lim int (phi* Delta psi - (Delta phi)* psi) over R^3 minus balls about
/// the scene centers.
Complex laplacian_bracket(const GaussianCuspFunction& phi,
                          const GaussianCuspFunction& psi,
                          const SceneConfig& scene, const QuadratureSpec& quad);

/// Bracket of Delta between f = R_h phi / r_h and g = R_k psi / r_k.
Complex v_bracket(const GaussianCuspFunction& phi,
                  const GaussianCuspFunction& psi, const Vec3& y_h,
                  const Vec3& y_k, const QuadratureSpec& quad);

/// 4 pi [phi* psi (y_k) - phi* psi (y_h)] / |y_h - y_k| as printed for the
/// two-center bracket.
Complex v_closed_form_printed(const GaussianCuspFunction& phi,
                              const GaussianCuspFunction& psi, const Vec3& y_h,
                              const Vec3& y_k);

/// 4 pi [A_phi,h(d)* psi(y_k) - phi*(y_h) A_psi,k(d)] / d, which keeps the
/// sphere averages of the projectors.
Complex v_closed_form_projected(const GaussianCuspFunction& phi,
                                const GaussianCuspFunction& psi,
                                const Vec3& y_h, const Vec3& y_k);

/// int conj(f) g for Gaussian sums, closed form.
Complex gaussian_overlap(const GaussianCuspFunction& f,
                         const GaussianCuspFunction& g);

/// Function of (Z, z) factorized as cm(Z) * rel(z).
struct PairTestFunction {
  GaussianCuspFunction cm;   // Gaussian terms only
  GaussianCuspFunction rel;  // cusps at z = 0 allowed
};

ReportRow verify_m_identity(const GaussianCuspFunction& phi,
                            const GaussianCuspFunction& psi,
                            const SceneConfig& scene, const QuadratureSpec& quad);

ReportRow verify_laplacian_symmetry(const GaussianCuspFunction& phi,
                                    const GaussianCuspFunction& psi,
                                    const SceneConfig& scene,
                                    const QuadratureSpec& quad);

/// Two rows: the single bracket against the printed closed form, and the
/// charge-weighted h <-> k sum against zero. Needs exactly two centers.
std::vector<ReportRow> verify_v_crossterm(const GaussianCuspFunction& phi,
                                          const GaussianCuspFunction& psi,
                                          const SceneConfig& scene,
                                          const QuadratureSpec& quad);

ReportRow verify_sigma_identity(const PairTestFunction& phi,
                                const PairTestFunction& psi,
                                const QuadratureSpec& quad);

inline constexpr double kMTolerance = 1e-5;
inline constexpr double kSigmaTolerance = 1e-5;
inline constexpr double kVClosedFormTolerance = 1e-4;
inline constexpr double kVCancellationTolerance = 1e-4;
inline constexpr double kLaplacianTolerance = 1e-6;

struct SuiteConfig {
  int n_scenes = 12;
  std::uint64_t seed = 20240611;
  /// Scale every right-hand side by (1 + injection) to exercise the harness.
  bool self_test = false;
  double injection = 0.01;
  QuadratureSpec quad;
  /// Families to run: m_identity, laplacian_symmetry, sigma_identity, v_crossterm.
  std::vector<std::string> identities = {"m_identity", "laplacian_symmetry",
                                         "sigma_identity", "v_crossterm"};

  void validate() const;
};

struct VerificationReport {
  std::vector<ReportRow> rows;

  std::size_t failures() const;
  bool passed() const { return failures() == 0; }
};

VerificationReport run_suite(const SuiteConfig& config);

/// identity,scene,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,tolerance,pass,note
void write_report_csv(std::ostream& out, const VerificationReport& report);

}  // namespace intop
