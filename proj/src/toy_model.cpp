#include "intop/toy_model.hpp"

#include <sstream>

#include "intop/errors.hpp"

namespace intop {

void ToyParams::validate() const {
  if (!(mass_m > 0.0) || !std::isfinite(mass_m)) {
    throw ParameterError("toy model: mass must be positive");
  }
  if (!(energy_e >= 0.0) || !std::isfinite(energy_e)) {
    throw ParameterError("toy model: source energy must be >= 0");
  }
  if (!(coupling_g > 0.0) || !std::isfinite(coupling_g)) {
    throw ParameterError("toy model: coupling g must be > 0");
  }
  if (lambda_scale == 0.0 || !std::isfinite(lambda_scale)) {
    throw ParameterError("toy model: lambda must be nonzero");
  }
  if (!std::isfinite(point_coupling_mu)) {
    throw ParameterError("toy model: point coupling must be finite");
  }
}

double ToyState::norm_squared() const {
  return inner_product(profile, profile).real() + std::norm(amplitude_c);
}

double amplitude_scale(const ToyParams& params) {
  return std::sqrt(kFourPi) / params.lambda_scale;
}

ToyState constraint_embed(const RadialProfile& profile,
                          const ToyParams& params) {
  return {profile, amplitude_scale(params) * boundary_data(profile).value_b};
}

double constraint_residual(const ToyState& state, const ToyParams& params) {
  return std::abs(state.amplitude_c -
                  amplitude_scale(params) * state.profile.values.front());
}

ToySystem assemble(const ToyParams& params, const RadialGrid& grid) {
  params.validate();
  const RadialCells cells(grid);
  const auto n = static_cast<std::int64_t>(grid.size());
  const std::int64_t dim = n - 1;

  std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) ids[static_cast<std::size_t>(j)] = j < dim ? j : -1;

  StiffnessAccumulators acc(dim);
  add_radial_line(acc, cells, ids, 1.0 / (2.0 * params.mass_m),
                  params.coupling_g, 1.0);

  const double s = amplitude_scale(params);
  std::vector<double> mass(static_cast<std::size_t>(dim));
  std::vector<double> energy(mass.size(), params.energy_e);
  std::vector<double> extra(mass.size(), 0.0);
  std::vector<int> sector(mass.size(), 1);
  mass[0] = s * s;
  extra[0] = params.point_coupling_mu * (s * s);
  sector[0] = 0;
  for (std::size_t j = 1; j < mass.size(); ++j) mass[j] = cells.node_mass[j];

  return {finalize_system(grid, acc, mass, energy, extra, std::move(sector), 2),
          params};
}

std::pair<Eigen::VectorXcd, double> to_coefficients(const ToySystem& sys,
                                                     const ToyState& state) {
  const auto& grid = sys.pencil.grid;
  if (!(state.profile.grid == grid)) {
    throw GridMismatchError("toy state lives on a different grid");
  }
  const std::size_t n = grid.size();
  Eigen::VectorXcd x(static_cast<Eigen::Index>(n - 1));
  x[0] = state.amplitude_c / amplitude_scale(sys.params);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    x[static_cast<Eigen::Index>(j)] = state.profile.values[j];
  }
  const double total = state.norm_squared();
  const double kept = std::pow(mass_norm(sys.pencil, x), 2);
  const double loss = total > 0.0 ? std::max(0.0, (total - kept) / total) : 0.0;
  return {std::move(x), loss};
}

ToyState from_coefficients(const ToySystem& sys, const Eigen::VectorXcd& x) {
  const auto& grid = sys.pencil.grid;
  if (x.size() + 1 != static_cast<Eigen::Index>(grid.size())) {
    throw SizingError("toy coefficients have the wrong dimension");
  }
  RadialProfile profile(grid);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    profile.values[static_cast<std::size_t>(j)] = x[j];
  }
  return {std::move(profile), amplitude_scale(sys.params) * x[0]};
}

std::vector<ToyEigenpair> lowest_eigenpairs(const ToySystem& sys,
                                            std::int64_t k) {
  const auto eig = lowest_generalized_eigenpairs(sys.pencil, k);
  std::vector<ToyEigenpair> out;
  for (std::int64_t c = 0; c < k; ++c) {
    const Eigen::VectorXcd v = eig.vectors.col(c).cast<Complex>();
    out.push_back({eig.values[c], from_coefficients(sys, v)});
  }
  return out;
}

ToyTrajectory evolve(const ToySystem& sys, const ToyState& initial, double dt,
                     std::size_t n_steps, const EvolveOptions& opts) {
  auto [x0, loss] = to_coefficients(sys, initial);
  MidpointPropagator prop(sys.pencil, dt);
  ToyTrajectory out{prop.run(x0, n_steps, opts), {}};
  out.series.projection_loss = loss;
  if (loss > kProjectionWarnThreshold) {
    std::ostringstream msg;
    msg << "initial state projected onto the constrained domain, relative "
           "norm loss "
        << loss;
    out.series.warnings.push_back(msg.str());
  }
  const double scale = std::sqrt(initial.norm_squared());
  const double residual = constraint_residual(initial, sys.params);
  if (scale > 0.0 && residual > kProjectionWarnThreshold * scale) {
    std::ostringstream msg;
    msg << "initial state violates the boundary condition, residual "
        << residual << "; node 0 was reset from the source amplitude";
    out.series.warnings.push_back(msg.str());
  }
  for (const auto& snap : out.series.snapshots) {
    out.states.push_back(from_coefficients(sys, snap));
  }
  return out;
}

ToyState pure_source_state(const ToySystem& sys) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(sys.pencil.dim());
  x[0] = 1.0 / amplitude_scale(sys.params);
  return from_coefficients(sys, x);
}

SectorSplit sector_probabilities(const ToyState& state) {
  const double boson = inner_product(state.profile, state.profile).real();
  const double source = std::norm(state.amplitude_c);
  const double total = boson + source;
  if (!(total > 0.0)) throw ParameterError("zero-norm state");
  return {boson / total, source / total};
}

double default_time_step(const RadialGrid& grid) {
  return grid.r_max() / (static_cast<double>(grid.size()) * 10.0);
}

}  // namespace intop
