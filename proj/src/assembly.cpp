#include "intop/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "intop/errors.hpp"

namespace intop {

std::uint64_t SymmetricAccumulator::key(std::int64_t i, std::int64_t j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
}

std::pair<std::int64_t, std::int64_t> SymmetricAccumulator::unkey(
    std::uint64_t k) {
  return {static_cast<std::int64_t>(k >> 32),
          static_cast<std::int64_t>(k & 0xffffffffULL)};
}

void SymmetricAccumulator::add(std::int64_t i, std::int64_t j, double value) {
  entries_[key(i, j)] += value;
}

void SymmetricAccumulator::set(std::int64_t i, std::int64_t j, double value) {
  entries_[key(i, j)] = value;
}

double SymmetricAccumulator::get(std::int64_t i, std::int64_t j) const {
  auto it = entries_.find(key(i, j));
  return it == entries_.end() ? 0.0 : it->second;
}

RadialCells::RadialCells(const RadialGrid& grid)
    : kinetic(kinetic_cell_weights(grid)),
      lambda(lambda_cell_weights(grid)),
      node_mass(mass_weights(grid)) {}

void add_radial_line(StiffnessAccumulators& acc, const RadialCells& cells,
                     std::span<const std::int64_t> ids, double kinetic_coef,
                     double coupling_coef, double weight) {
  const double kin_scale = kinetic_coef * weight;
  const double cpl_scale = coupling_coef * weight;
  for (std::size_t j = 0; j + 1 < ids.size(); ++j) {
    const std::int64_t a = ids[j];
    const std::int64_t b = ids[j + 1];
    if (a < 0 && b < 0) continue;
    const double k = kin_scale * cells.kinetic[j];
    const double g = cpl_scale * cells.lambda[j];
    const double l = -(weight * cells.lambda[j]);
    for (auto [acc_ref, c] :
         {std::pair<SymmetricAccumulator*, double>{&acc.kinetic, k},
          {&acc.coupling, g},
          {&acc.lambda, l}}) {
      if (a >= 0) acc_ref->add(a, a, c);
      if (b >= 0) acc_ref->add(b, b, c);
      if (a >= 0 && b >= 0) acc_ref->add(a, b, -c);
    }
  }
}

SparseMatrix to_sparse(const SymmetricAccumulator& acc) {
  std::vector<Eigen::Triplet<double, std::int64_t>> t;
  t.reserve(acc.entries().size() * 2);
  for (const auto& [k, v] : acc.entries()) {
    auto [i, j] = SymmetricAccumulator::unkey(k);
    t.emplace_back(i, j, v);
    if (i != j) t.emplace_back(j, i, v);
  }
  SparseMatrix m(acc.dim(), acc.dim());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

AssembledSystem finalize_system(const RadialGrid& grid,
                                const StiffnessAccumulators& acc,
                                std::span<const double> mass_diag,
                                std::span<const double> energy_diag,
                                std::span<const double> extra_diag,
                                std::vector<int> sector, int n_sectors) {
  const std::int64_t dim = acc.kinetic.dim();
  SymmetricAccumulator h(dim);
  for (const auto* part : {&acc.kinetic, &acc.coupling}) {
    for (const auto& [k, v] : part->entries()) {
      auto [i, j] = SymmetricAccumulator::unkey(k);
      h.set(i, j, acc.kinetic.get(i, j) + acc.coupling.get(i, j));
    }
  }
  SymmetricAccumulator m(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (!(mass_diag[ii] > 0.0)) {
      std::ostringstream msg;
      msg << "constrained basis element " << i << " has no mass";
      throw SolverError(msg.str());
    }
    m.set(i, i, mass_diag[ii]);
    h.set(i, i, (h.get(i, i) + energy_diag[ii] * mass_diag[ii]) + extra_diag[ii]);
  }
  AssembledSystem sys{grid,
                      to_sparse(h),
                      to_sparse(m),
                      to_sparse(acc.lambda),
                      std::move(sector),
                      n_sectors};
  return sys;
}

double hermiticity_defect(const SparseMatrix& a) {
  double worst = 0.0;
  for (std::int64_t c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      worst = std::max(worst, std::abs(it.value() - a.coeff(it.col(), it.row())));
    }
  }
  return worst;
}

double quadratic_form(const SparseMatrix& a, const Eigen::VectorXcd& x) {
  const Eigen::VectorXcd ax = a * x;
  return x.dot(ax).real();
}

std::vector<double> sector_probabilities(const AssembledSystem& sys,
                                         const Eigen::VectorXcd& x) {
  std::vector<double> p(static_cast<std::size_t>(sys.n_sectors), 0.0);
  double total = 0.0;
  for (std::int64_t i = 0; i < sys.dim(); ++i) {
    const double w = sys.mass_matrix.coeff(i, i) * std::norm(x[i]);
    p[static_cast<std::size_t>(sys.sector[static_cast<std::size_t>(i)])] += w;
    total += w;
  }
  if (!(total > 0.0)) throw ParameterError("zero-norm state");
  for (auto& v : p) v /= total;
  return p;
}

double mass_norm(const AssembledSystem& sys, const Eigen::VectorXcd& x) {
  return std::sqrt(quadratic_form(sys.mass_matrix, x));
}

double spectral_radius(const AssembledSystem& sys, int iterations) {
  const Eigen::VectorXd inv_mass = sys.mass_matrix.diagonal().cwiseInverse();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(sys.dim());
  for (std::int64_t i = 0; i < sys.dim(); ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    v /= v.norm();
    Eigen::VectorXd w = inv_mass.cwiseProduct(sys.hamiltonian * v);
    estimate = w.norm();
    if (!(estimate > 0.0)) return 0.0;
    v = w;
  }
  return estimate;
}

EigenResult lowest_generalized_eigenpairs(const AssembledSystem& sys,
                                          std::int64_t k) {
  if (k < 1 || k > sys.dim()) {
    throw SizingError("eigenpairs: k must lie in [1, basis dimension]");
  }
  const Eigen::MatrixXd h = Eigen::MatrixXd(sys.hamiltonian);
  const Eigen::MatrixXd m = Eigen::MatrixXd(sys.mass_matrix);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      h, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "generalized eigensolver failed (Eigen info " << solver.info()
        << ", dimension " << sys.dim() << ")";
    throw SolverError(msg.str());
  }
  EigenResult out;
  out.values = solver.eigenvalues().head(k);
  out.vectors = solver.eigenvectors().leftCols(k);
  for (std::int64_t c = 0; c < k; ++c) {
    const Eigen::VectorXd v = out.vectors.col(c);
    const Eigen::VectorXd hv = h * v;
    const double res = (hv - out.values[c] * (m * v)).norm();
    const double scale = std::max(hv.norm(), std::abs(out.values[c]) * (m * v).norm());
    out.max_relative_residual =
        std::max(out.max_relative_residual, scale > 0.0 ? res / scale : res);
  }
  if (out.max_relative_residual > 1e-8) {
    std::ostringstream msg;
    msg << "generalized eigensolver residual " << out.max_relative_residual
        << " exceeds 1e-8";
    throw SolverError(msg.str());
  }
  return out;
}

}  // namespace intop
