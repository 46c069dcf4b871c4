#pragma once

// Emission/absorption chain: one source frozen at the origin and up to n_max
// radially symmetric bosons. Sector n is stored as a dense n-dimensional
// array over the radial grid, axis 0 varying fastest.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "intop/assembly.hpp"
#include "intop/propagator.hpp"
#include "intop/radial.hpp"

namespace intop {

struct FockChainParams {
  double boson_mass = 1.0;
  double source_energy = 0.0;
  /// Energy offset per boson.
  double boson_energy = 0.0;
  double coupling_h = 1.0;
  int n_max = 1;
  /// Upper bound on sum_n (n_nodes - 1)^n.
  std::int64_t dof_budget = 5'000'000;

  void validate() const;
};

struct FockChainState {
  FockChainState(const RadialGrid& grid, int n_max);

  RadialGrid grid;
  /// sectors[n] has n_nodes^n entries; sectors[0] is the bare amplitude.
  std::vector<std::vector<Complex>> sectors;

  int n_max() const { return static_cast<int>(sectors.size()) - 1; }
  /// sum_n sum over the tensor grid of prod_i node_mass |phi|^2.
  double norm_squared() const;
};

/// Average over all n! axis permutations.
std::vector<Complex> symmetrize(const std::vector<Complex>& sector, int n,
                                std::size_t n_nodes);

/// Max |a - a o sigma| over all transpositions sigma.
double permutation_defect(const std::vector<Complex>& sector, int n,
                          std::size_t n_nodes);

/// phi^(n)(0, r_2, .., r_n) along axis 0.
std::vector<Complex> apply_boundary_b(const FockChainState& state, int n);

/// 4 pi d/dr_1 phi^(n)(r_1, r_2, .., r_n) at r_1 = 0.
std::vector<Complex> apply_boundary_c(const FockChainState& state, int n);

struct FockChainSystem {
  AssembledSystem pencil;
  FockChainParams params;
  /// Sorted interior node indices (1..n_nodes-2) of every basis element.
  std::vector<std::vector<int>> multisets;
  /// One lookup per sector, keyed by the packed multiset.
  std::vector<std::unordered_map<std::int64_t, std::int64_t>> index;

  /// Basis element carrying a tensor multi-index, or -1 if pinned.
  std::int64_t element_of(std::span<const int> multi_index) const;
};

/// Basis: sorted multisets of interior nodes per sector. A tensor node with
/// k zero coordinates is identified with the element of sector n - k built
/// from the remaining coordinates, which imposes the boundary condition on
/// every axis (corners transitively); nodes at r_max are pinned to zero.
FockChainSystem assemble_chain(const FockChainParams& params,
                               const RadialGrid& grid);

/// Projects a state onto the constrained basis: permutation average over
/// interior nodes, boundary slices overwritten by lower sectors.
std::pair<Eigen::VectorXcd, double> to_coefficients(const FockChainSystem& sys,
                                                     const FockChainState& state);
FockChainState from_coefficients(const FockChainSystem& sys,
                                 const Eigen::VectorXcd& x);

struct FockTrajectory {
  Trajectory series;  // sector n = n bosons
  std::vector<double> expected_boson_number;
  std::vector<FockChainState> states;
};

FockTrajectory evolve_chain(const FockChainSystem& sys,
                            const FockChainState& initial, double dt,
                            std::size_t n_steps, const EvolveOptions& opts = {});

/// Unit amplitude in the no-boson sector.
FockChainState vacuum_state(const FockChainSystem& sys);

}  // namespace intop
