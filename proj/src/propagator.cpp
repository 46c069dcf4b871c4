#include "intop/propagator.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "intop/errors.hpp"

namespace intop {

using ComplexSparse = Eigen::SparseMatrix<std::complex<double>>;

struct MidpointPropagator::Factorization {
  ComplexSparse rhs;
  Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>> lu;
};

namespace {

ComplexSparse pencil(const AssembledSystem& sys, std::complex<double> factor) {
  const auto n = static_cast<int>(sys.dim());
  std::vector<Eigen::Triplet<std::complex<double>>> t;
  for (std::int64_t c = 0; c < sys.mass_matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(sys.mass_matrix, c); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     it.value());
    }
  }
  for (std::int64_t c = 0; c < sys.hamiltonian.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(sys.hamiltonian, c); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     factor * it.value());
    }
  }
  ComplexSparse a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

}  // namespace

MidpointPropagator::MidpointPropagator(const AssembledSystem& sys, double dt)
    : sys_(&sys), dt_(dt) {
  if (!std::isfinite(dt) || dt == 0.0) {
    throw ParameterError("propagator: time step must be finite and nonzero");
  }
  auto f = std::make_shared<Factorization>();
  const std::complex<double> half_step(0.0, 0.5 * dt);
  f->rhs = pencil(sys, -half_step);
  const ComplexSparse lhs = pencil(sys, half_step);
  f->lu.analyzePattern(lhs);
  f->lu.factorize(lhs);
  if (f->lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "propagator: factorization of M + i dt/2 H failed: "
        << f->lu.lastErrorMessage();
    throw SolverError(msg.str());
  }
  lu_ = std::move(f);
}

Eigen::VectorXcd MidpointPropagator::step(const Eigen::VectorXcd& x) const {
  const Eigen::VectorXcd b = lu_->rhs * x;
  Eigen::VectorXcd next = lu_->lu.solve(b);
  if (lu_->lu.info() != Eigen::Success) {
    throw SolverError("propagator: linear solve failed");
  }
  return next;
}

Trajectory MidpointPropagator::run(const Eigen::VectorXcd& x0,
                                   std::size_t n_steps,
                                   const EvolveOptions& opts) const {
  if (x0.size() != sys_->dim()) {
    throw SizingError("propagator: initial state has wrong dimension");
  }
  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.norms.reserve(n_steps + 1);
  traj.sector_probabilities.reserve(n_steps + 1);
  Eigen::VectorXcd x = x0;
  auto record = [&](std::size_t k) {
    const double t = static_cast<double>(k) * dt_;
    traj.times.push_back(t);
    traj.norms.push_back(mass_norm(*sys_, x));
    traj.sector_probabilities.push_back(sector_probabilities(*sys_, x));
    const bool keep = k == 0 || k == n_steps ||
                      (opts.snapshot_stride > 0 && k % opts.snapshot_stride == 0);
    if (keep) {
      traj.snapshot_times.push_back(t);
      traj.snapshots.push_back(x);
    }
  };
  record(0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    x = step(x);
    record(k);
  }
  return traj;
}

}  // namespace intop
