#include "intop/pair_model.hpp"

#include <cmath>

#include "intop/errors.hpp"

namespace intop {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

ToyState to_toy(const PairState& s) {
  return {s.relative_profile, s.boson_amplitude};
}

PairState from_toy(const ToyState& s) { return {s.profile, s.amplitude_c}; }

// (z_h, zbar_k) = T (Z, z).
Mat6 cm_transform() {
  Mat6 t = Mat6::Zero();
  for (int i = 0; i < 3; ++i) {
    t(i, i) = 1.0;
    t(i, 3 + i) = 0.5;
    t(3 + i, i) = 1.0;
    t(3 + i, 3 + i) = -0.5;
  }
  return t;
}

Mat6 hessian(const PairGaussian::Term& term, const Vec6& w) {
  const Vec6 grad = -term.q * w + term.p;
  const double value =
      term.amplitude * std::exp(-0.5 * w.dot(term.q * w) + term.p.dot(w));
  return value * (grad * grad.transpose() - term.q);
}

}  // namespace

void PairParams::validate() const {
  if (!(fermion_mass > 0.0) || !std::isfinite(fermion_mass)) {
    throw ParameterError("pair model: fermion mass must be positive");
  }
  if (!(boson_channel_energy >= 0.0) || !std::isfinite(boson_channel_energy)) {
    throw ParameterError("pair model: boson channel energy must be >= 0");
  }
  if (!(coupling_g > 0.0) || !std::isfinite(coupling_g)) {
    throw ParameterError("pair model: coupling g must be > 0");
  }
}

ToyParams to_toy_params(const PairParams& params) {
  ToyParams t;
  t.mass_m = params.fermion_mass / 2.0;
  t.energy_e = params.boson_channel_energy;
  t.coupling_g = params.coupling_g * kPairMultiplicity;
  return t;
}

double PairState::norm_squared() const { return to_toy(*this).norm_squared(); }

PairState pair_embed(const RadialProfile& relative_profile) {
  return from_toy(constraint_embed(relative_profile, ToyParams{}));
}

double constraint_residual(const PairState& state) {
  return constraint_residual(to_toy(state), ToyParams{});
}

std::pair<Vec3, Vec3> cm_coordinates(const Vec3& z_h, const Vec3& zbar_k) {
  return {0.5 * (z_h + zbar_k), z_h - zbar_k};
}

std::pair<Vec3, Vec3> from_cm_coordinates(const Vec3& cm, const Vec3& rel) {
  return {cm + 0.5 * rel, cm - 0.5 * rel};
}

double relative_kinetic_identity(const PairGaussian& f,
                                 const std::vector<Vec6>& samples) {
  const Mat6 t = cm_transform();
  const Mat6 t_inv = t.inverse();
  double worst = 0.0;
  for (const auto& w : samples) {
    double lhs = 0.0;
    double rhs = 0.0;
    const Vec6 v = t_inv * w;
    for (const auto& term : f.terms) {
      const Mat6 h = hessian(term, w);
      for (int i = 0; i < 3; ++i) {
        Vec6 u = Vec6::Zero();
        u[i] = 1.0;
        u[3 + i] = -1.0;
        lhs += 0.25 * u.dot(h * u);
      }
      const PairGaussian::Term moved{term.amplitude, t.transpose() * term.q * t,
                                     t.transpose() * term.p};
      rhs += hessian(moved, v).bottomRightCorner<3, 3>().trace();
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

PairSystem assemble_pair(const PairParams& params, const RadialGrid& grid) {
  params.validate();
  auto toy = assemble(to_toy_params(params), grid);
  return {toy.pencil, params, toy};
}

PairTrajectory annihilation_dynamics(const PairSystem& sys,
                                     const PairState& initial, double dt,
                                     std::size_t n_steps,
                                     const EvolveOptions& opts) {
  auto toy = evolve(sys.toy, to_toy(initial), dt, n_steps, opts);
  PairTrajectory out{std::move(toy.series), {}, {}, {}};
  for (const auto& p : out.series.sector_probabilities) {
    out.p_boson.push_back(p[0]);
    out.p_pair.push_back(p[1]);
  }
  for (const auto& s : toy.states) out.states.push_back(from_toy(s));
  return out;
}

PairState pure_boson_state(const PairSystem& sys) {
  return from_toy(pure_source_state(sys.toy));
}

}  // namespace intop
