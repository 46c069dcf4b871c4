#pragma once

// Shared assembly machinery for the reduced sector-coupled models. Every
// matrix is accumulated on the upper triangle and mirrored, so Hermiticity
// holds entrywise by construction rather than by stencil cancellation.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "intop/radial.hpp"

namespace intop {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int64_t>;

/// Upper-triangle accumulator for a real symmetric matrix.
class SymmetricAccumulator {
 public:
  explicit SymmetricAccumulator(std::int64_t dim) : dim_(dim) {}

  void add(std::int64_t i, std::int64_t j, double value);
  void set(std::int64_t i, std::int64_t j, double value);
  double get(std::int64_t i, std::int64_t j) const;
  std::int64_t dim() const { return dim_; }
  const std::unordered_map<std::uint64_t, double>& entries() const {
    return entries_;
  }

  static std::uint64_t key(std::int64_t i, std::int64_t j);
  static std::pair<std::int64_t, std::int64_t> unkey(std::uint64_t k);

 private:
  std::int64_t dim_;
  std::unordered_map<std::uint64_t, double> entries_;
};

/// Stiffness accumulators shared by all models: kinetic part (already
/// scaled by 1/2m), coupling part (scaled by the coupling constant, positive
/// semidefinite) and the bare Lambda_s form (unscaled, negative
/// semidefinite).
struct StiffnessAccumulators {
  explicit StiffnessAccumulators(std::int64_t dim)
      : kinetic(dim), coupling(dim), lambda(dim) {}
  SymmetricAccumulator kinetic;
  SymmetricAccumulator coupling;
  SymmetricAccumulator lambda;
};

/// Per-cell radial coefficients of a grid, computed once.
struct RadialCells {
  explicit RadialCells(const RadialGrid& grid);
  std::vector<double> kinetic;
  std::vector<double> lambda;
  std::vector<double> node_mass;
};

/// Adds the contribution of one radial line. ids[j] is the basis element
/// carrying node j of the line, or -1 for a node pinned to zero. weight is
/// the product of the transverse quadrature weights.
void add_radial_line(StiffnessAccumulators& acc, const RadialCells& cells,
                     std::span<const std::int64_t> ids, double kinetic_coef,
                     double coupling_coef, double weight);

/// Hermitian pencil (H, M) on a constrained nodal basis.
struct AssembledSystem {
  RadialGrid grid;
  SparseMatrix hamiltonian;
  SparseMatrix mass_matrix;
  /// Bare Lambda_s (or M + C_Lambda) form on the constrained basis.
  SparseMatrix lambda_block;
  /// Sector label of every basis element (particle-number sector).
  std::vector<int> sector;
  int n_sectors = 0;

  std::int64_t dim() const { return hamiltonian.rows(); }
};

/// H = K + G + e_i M_ii (+ extra_diag_i) with M diagonal.
AssembledSystem finalize_system(const RadialGrid& grid,
                                const StiffnessAccumulators& acc,
                                std::span<const double> mass_diag,
                                std::span<const double> energy_diag,
                                std::span<const double> extra_diag,
                                std::vector<int> sector, int n_sectors);

SparseMatrix to_sparse(const SymmetricAccumulator& acc);

/// max |A_ij - conj(A_ji)| over stored entries.
double hermiticity_defect(const SparseMatrix& a);

/// Quadratic form x^H A x (real for real symmetric A).
double quadratic_form(const SparseMatrix& a, const Eigen::VectorXcd& x);

/// Probability per sector: sum over elements of sector s of M_ii |x_i|^2,
/// divided by the total. Requires diagonal mass.
std::vector<double> sector_probabilities(const AssembledSystem& sys,
                                         const Eigen::VectorXcd& x);

double mass_norm(const AssembledSystem& sys, const Eigen::VectorXcd& x);

/// Largest |eigenvalue| of M^{-1} H by power iteration (M diagonal).
double spectral_radius(const AssembledSystem& sys, int iterations = 200);

/// Eigenpairs of H v = lambda M v, ascending, M-orthonormal.
struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
  double max_relative_residual = 0.0;
};

EigenResult lowest_generalized_eigenpairs(const AssembledSystem& sys,
                                          std::int64_t k);

}  // namespace intop
