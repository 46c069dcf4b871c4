#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "intop/assembly.hpp"

namespace intop {

struct EvolveOptions {
  /// Keep every stride-th coefficient vector; 0 keeps only the first and last.
  std::size_t snapshot_stride = 0;
};

/// Time series produced by the implicit-midpoint propagator. Row k of every
/// per-step series belongs to time k * dt (row 0 is the initial state).
struct Trajectory {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<std::vector<double>> sector_probabilities;
  std::vector<double> snapshot_times;
  std::vector<Eigen::VectorXcd> snapshots;
  double projection_loss = 0.0;
  std::vector<std::string> warnings;
};

/// Implicit midpoint (M + i dt/2 H) x_{n+1} = (M - i dt/2 H) x_n. The pencil
/// is factorized once per call.
class MidpointPropagator {
 public:
  MidpointPropagator(const AssembledSystem& sys, double dt);

  Eigen::VectorXcd step(const Eigen::VectorXcd& x) const;
  Trajectory run(const Eigen::VectorXcd& x0, std::size_t n_steps,
                 const EvolveOptions& opts = {}) const;

  double dt() const { return dt_; }

 private:
  struct Factorization;

  const AssembledSystem* sys_;
  double dt_;
  std::shared_ptr<const Factorization> lu_;
};

/// Relative projection loss above which a trajectory carries a warning.
inline constexpr double kProjectionWarnThreshold = 1e-6;

}  // namespace intop
