#pragma once

// Fixed source at the origin emitting and absorbing a single boson, on
// L2(R^3) (+) C, reduced to the l = 0 channel.

#include <cmath>
#include <utility>
#include <vector>

#include "intop/assembly.hpp"
#include "intop/propagator.hpp"
#include "intop/radial.hpp"

namespace intop {

struct ToyParams {
  double mass_m = 1.0;
  double energy_e = 0.0;
  double coupling_g = 1.0;
  /// lambda of the generalized B = psi_00(0)/lambda, C = lambda psi_00'(0).
  double lambda_scale = std::sqrt(kFourPi);
  /// Strength of the optional point term mu c(phi)* c(psi).
  double point_coupling_mu = 0.0;

  void validate() const;
};

/// (boson profile, source amplitude).
struct ToyState {
  RadialProfile profile;
  Complex amplitude_c;

  double norm_squared() const;
};

/// c = amplitude_scale * phi(0); equals 1 for the default lambda.
double amplitude_scale(const ToyParams& params);

ToyState constraint_embed(const RadialProfile& profile, const ToyParams& params);

/// |c - amplitude_scale * phi(0)|.
double constraint_residual(const ToyState& state, const ToyParams& params);

struct ToySystem {
  AssembledSystem pencil;
  ToyParams params;
};

/// Basis: node values phi_0..phi_{n-2} (phi at r_max pinned to 0), with c
/// eliminated through the boundary condition. H-form is
/// (1/2m) kinetic + E (L2 + |c|^2) + g (-lambda_form) + mu |c|^2.
ToySystem assemble(const ToyParams& params, const RadialGrid& grid);

/// Coefficient vector of a state in the constrained basis. States that
/// violate the boundary condition or carry weight at r_max are projected
/// mass-orthogonally; the relative norm loss is returned.
std::pair<Eigen::VectorXcd, double> to_coefficients(const ToySystem& sys,
                                                     const ToyState& state);
ToyState from_coefficients(const ToySystem& sys, const Eigen::VectorXcd& x);

struct ToyEigenpair {
  double eigenvalue;
  ToyState state;
};

std::vector<ToyEigenpair> lowest_eigenpairs(const ToySystem& sys,
                                            std::int64_t k);

struct ToyTrajectory {
  Trajectory series;  // sector 0 = source, sector 1 = boson
  std::vector<ToyState> states;  // one per snapshot time
};

ToyTrajectory evolve(const ToySystem& sys, const ToyState& initial, double dt,
                     std::size_t n_steps, const EvolveOptions& opts = {});

/// Pure-source initial state: only node 0 is populated, which carries no L2
/// weight, so the boson probability is exactly zero.
ToyState pure_source_state(const ToySystem& sys);

struct SectorSplit {
  double p_boson;
  double p_source;
};

SectorSplit sector_probabilities(const ToyState& state);

/// Default time step r_max / (10 n_nodes).
double default_time_step(const RadialGrid& grid);

}  // namespace intop
