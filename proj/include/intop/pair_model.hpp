#pragma once

// One electron/antielectron pair coupled to a single boson amplitude. With
// the centre of mass separated, the relative problem has the same form as
// the toy model, so assembly is delegated to it.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "intop/toy_model.hpp"

namespace intop {

/// N_e * N_ebar factor of the pair operator; one pair in this reduction.
inline constexpr double kPairMultiplicity = 1.0;

struct PairParams {
  double fermion_mass = 1.0;
  double boson_channel_energy = 0.0;
  double coupling_g = 1.0;

  void validate() const;
};

/// Toy parameters with m = fermion_mass / 2 and E = boson_channel_energy.
ToyParams to_toy_params(const PairParams& params);

struct PairState {
  RadialProfile relative_profile;
  Complex boson_amplitude;

  double norm_squared() const;
};

PairState pair_embed(const RadialProfile& relative_profile);
double constraint_residual(const PairState& state);

using Vec3 = Eigen::Vector3d;

/// Z = (z_h + zbar_k) / 2, z = z_h - zbar_k.
std::pair<Vec3, Vec3> cm_coordinates(const Vec3& z_h, const Vec3& zbar_k);
std::pair<Vec3, Vec3> from_cm_coordinates(const Vec3& cm, const Vec3& rel);

/// Sum of a_t exp(-w^T Q_t w / 2 + p_t^T w) over w = (z_h, zbar_k) in R^6.
struct PairGaussian {
  struct Term {
    double amplitude;
    Eigen::Matrix<double, 6, 6> q;
    Eigen::Matrix<double, 6, 1> p;
  };
  std::vector<Term> terms;
};

/// max over samples of |(grad_h - grad_k)^2 f / 4 - Delta_z f|, the left
/// side from the Hessian in (z_h, zbar_k), the right side after the
/// coordinate change.
double relative_kinetic_identity(const PairGaussian& f,
                                 const std::vector<Eigen::Matrix<double, 6, 1>>& samples);

struct PairSystem {
  AssembledSystem pencil;
  PairParams params;
  ToySystem toy;
};

PairSystem assemble_pair(const PairParams& params, const RadialGrid& grid);

struct PairTrajectory {
  Trajectory series;
  std::vector<double> p_pair;
  std::vector<double> p_boson;
  std::vector<PairState> states;
};

PairTrajectory annihilation_dynamics(const PairSystem& sys,
                                     const PairState& initial, double dt,
                                     std::size_t n_steps,
                                     const EvolveOptions& opts = {});

/// Boson amplitude 1 with a relative profile supported only at z = 0.
PairState pure_boson_state(const PairSystem& sys);

}  // namespace intop
