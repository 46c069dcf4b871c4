#include "intop/fock_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "intop/errors.hpp"

namespace intop {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int k = 0; k < exp; ++k) out *= base;
  return out;
}

void decode(std::size_t flat, std::size_t n_nodes, std::vector<int>& mi) {
  for (auto& c : mi) {
    c = static_cast<int>(flat % n_nodes);
    flat /= n_nodes;
  }
}

std::size_t encode(std::span<const int> mi, std::size_t n_nodes) {
  std::size_t flat = 0;
  for (std::size_t k = mi.size(); k-- > 0;) {
    flat = flat * n_nodes + static_cast<std::size_t>(mi[k]);
  }
  return flat;
}

std::int64_t pack(std::span<const int> sorted, std::size_t n_nodes) {
  std::int64_t key = 0;
  for (int c : sorted) key = key * static_cast<std::int64_t>(n_nodes) + c;
  return key;
}

// Advances an odometer over [lo, hi]^k; false once it wraps.
bool advance(std::vector<int>& digits, int lo, int hi) {
  for (auto& d : digits) {
    if (d < hi) {
      ++d;
      return true;
    }
    d = lo;
  }
  return false;
}

void require_sector(const FockChainState& state, int n) {
  if (n < 1 || n > state.n_max()) {
    std::ostringstream msg;
    msg << "boundary operator: sector " << n << " outside [1, "
        << state.n_max() << "]";
    throw ParameterError(msg.str());
  }
}

template <class Extract>
std::vector<Complex> boundary_slice(const FockChainState& state, int n,
                                    Extract extract) {
  require_sector(state, n);
  const std::size_t nn = state.grid.size();
  const auto& a = state.sectors[static_cast<std::size_t>(n)];
  std::vector<Complex> out(ipow(nn, n - 1));
  for (std::size_t rest = 0; rest < out.size(); ++rest) {
    const Complex line[3] = {a[nn * rest], a[nn * rest + 1], a[nn * rest + 2]};
    out[rest] = extract(boundary_data(std::span<const Complex>(line, 3),
                                      state.grid.spacing()));
  }
  return out;
}

}  // namespace

void FockChainParams::validate() const {
  if (!(boson_mass > 0.0) || !std::isfinite(boson_mass)) {
    throw ParameterError("fock chain: boson mass must be positive");
  }
  if (!(source_energy >= 0.0) || !std::isfinite(source_energy)) {
    throw ParameterError("fock chain: source energy must be >= 0");
  }
  if (!(boson_energy >= 0.0) || !std::isfinite(boson_energy)) {
    throw ParameterError("fock chain: boson energy must be >= 0");
  }
  if (!(coupling_h > 0.0) || !std::isfinite(coupling_h)) {
    throw ParameterError("fock chain: coupling h must be > 0");
  }
  if (n_max < 1) throw ParameterError("fock chain: n_max must be >= 1");
  if (dof_budget < 1) throw ParameterError("fock chain: budget must be >= 1");
}

FockChainState::FockChainState(const RadialGrid& g, int n_max) : grid(g) {
  if (n_max < 0) throw ParameterError("fock chain state: n_max must be >= 0");
  for (int n = 0; n <= n_max; ++n) sectors.emplace_back(ipow(g.size(), n));
}

double FockChainState::norm_squared() const {
  const auto mass = mass_weights(grid);
  const std::size_t nn = grid.size();
  double total = 0.0;
  for (std::size_t n = 0; n < sectors.size(); ++n) {
    std::vector<int> mi(n);
    for (std::size_t flat = 0; flat < sectors[n].size(); ++flat) {
      decode(flat, nn, mi);
      double w = 1.0;
      for (int c : mi) w *= mass[static_cast<std::size_t>(c)];
      total += w * std::norm(sectors[n][flat]);
    }
  }
  return total;
}

std::vector<Complex> symmetrize(const std::vector<Complex>& sector, int n,
                                std::size_t n_nodes) {
  if (n > 6) throw SizingError("symmetrize: more than 6 axes");
  if (n < 0 || sector.size() != ipow(n_nodes, n)) {
    throw SizingError("symmetrize: array does not match n_nodes^n");
  }
  if (n <= 1) return sector;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> perms;
  std::iota(perm.begin(), perm.end(), 0);
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  const double inv = 1.0 / static_cast<double>(perms.size());

  std::vector<Complex> out(sector.size());
  std::vector<int> mi(perm.size()), pm(perm.size());
  for (std::size_t flat = 0; flat < sector.size(); ++flat) {
    decode(flat, n_nodes, mi);
    Complex acc = 0.0;
    for (const auto& p : perms) {
      for (std::size_t k = 0; k < p.size(); ++k) {
        pm[k] = mi[static_cast<std::size_t>(p[k])];
      }
      acc += sector[encode(pm, n_nodes)];
    }
    out[flat] = acc * inv;
  }
  return out;
}

double permutation_defect(const std::vector<Complex>& sector, int n,
                          std::size_t n_nodes) {
  double worst = 0.0;
  std::vector<int> mi(static_cast<std::size_t>(n));
  for (std::size_t flat = 0; flat < sector.size(); ++flat) {
    decode(flat, n_nodes, mi);
    for (std::size_t i = 0; i < mi.size(); ++i) {
      for (std::size_t j = i + 1; j < mi.size(); ++j) {
        std::swap(mi[i], mi[j]);
        worst = std::max(worst, std::abs(sector[flat] - sector[encode(mi, n_nodes)]));
        std::swap(mi[i], mi[j]);
      }
    }
  }
  return worst;
}

std::vector<Complex> apply_boundary_b(const FockChainState& state, int n) {
  return boundary_slice(state, n, [](const BoundaryData& d) { return d.value_b; });
}

std::vector<Complex> apply_boundary_c(const FockChainState& state, int n) {
  return boundary_slice(state, n, [](const BoundaryData& d) { return d.deriv_c; });
}

std::int64_t FockChainSystem::element_of(std::span<const int> multi_index) const {
  const int last = static_cast<int>(pencil.grid.size()) - 1;
  std::vector<int> nonzero;
  for (int c : multi_index) {
    if (c == last) return -1;
    if (c != 0) nonzero.push_back(c);
  }
  std::sort(nonzero.begin(), nonzero.end());
  const auto& map = index[nonzero.size()];
  return map.at(pack(nonzero, pencil.grid.size()));
}

FockChainSystem assemble_chain(const FockChainParams& params,
                               const RadialGrid& grid) {
  params.validate();
  const std::size_t nn = grid.size();
  const int interior_hi = static_cast<int>(nn) - 2;

  double dof = 0.0;
  for (int n = 0; n <= params.n_max; ++n) dof += std::pow(double(nn - 1), n);
  if (dof > static_cast<double>(params.dof_budget) ||
      std::pow(double(nn), params.n_max) > 4e18) {
    std::ostringstream msg;
    msg << "fock chain: " << dof << " tensor unknowns exceed the budget of "
        << params.dof_budget;
    throw BudgetError(msg.str());
  }

  FockChainSystem sys{
      AssembledSystem{grid, {}, {}, {}, {}, params.n_max + 1}, params, {}, {}};
  sys.index.resize(static_cast<std::size_t>(params.n_max) + 1);
  std::vector<int> sector_of;
  sys.multisets.push_back({});
  sys.index[0][0] = 0;
  sector_of.push_back(0);
  for (int n = 1; n <= params.n_max; ++n) {
    std::vector<int> s(static_cast<std::size_t>(n), 1);
    while (true) {
      const auto id = static_cast<std::int64_t>(sys.multisets.size());
      sys.index[static_cast<std::size_t>(n)][pack(s, nn)] = id;
      sys.multisets.push_back(s);
      sector_of.push_back(n);
      // Next nondecreasing sequence in [1, interior_hi], last digit fastest.
      int k = n - 1;
      while (k >= 0 && s[static_cast<std::size_t>(k)] == interior_hi) --k;
      if (k < 0) break;
      const int v = s[static_cast<std::size_t>(k)] + 1;
      for (int q = k; q < n; ++q) s[static_cast<std::size_t>(q)] = v;
    }
  }
  const auto dim = static_cast<std::int64_t>(sys.multisets.size());

  const RadialCells cells(grid);
  StiffnessAccumulators acc(dim);
  const double kin = 1.0 / (2.0 * params.boson_mass);
  std::vector<std::int64_t> ids(nn);
  for (int n = 1; n <= params.n_max; ++n) {
    std::vector<int> mi(static_cast<std::size_t>(n));
    for (int axis = 0; axis < n; ++axis) {
      std::vector<int> others(static_cast<std::size_t>(n - 1), 1);
      do {
        double w = 1.0;
        for (int c : others) w *= cells.node_mass[static_cast<std::size_t>(c)];
        for (std::size_t j = 0; j < nn; ++j) {
          std::size_t o = 0;
          for (int k = 0; k < n; ++k) {
            mi[static_cast<std::size_t>(k)] =
                k == axis ? static_cast<int>(j) : others[o++];
          }
          ids[j] = sys.element_of(mi);
        }
        add_radial_line(acc, cells, ids, kin, params.coupling_h, w);
      } while (advance(others, 1, interior_hi));
    }
  }

  std::vector<double> mass(static_cast<std::size_t>(dim));
  std::vector<double> energy(mass.size());
  std::vector<double> extra(mass.size(), 0.0);
  for (std::size_t id = 0; id < mass.size(); ++id) {
    const auto& s = sys.multisets[id];
    double m = 1.0;
    for (int c : s) m *= cells.node_mass[static_cast<std::size_t>(c)];
    // Number of distinct orderings of the multiset.
    double orderings = 1.0;
    std::size_t run = 1;
    for (std::size_t k = 1; k <= s.size(); ++k) {
      orderings *= static_cast<double>(k);
      if (k < s.size() && s[k] == s[k - 1]) {
        ++run;
        orderings /= static_cast<double>(run);
      } else {
        run = 1;
      }
    }
    mass[id] = m * orderings;
    const int n = sector_of[id];
    energy[id] = params.source_energy + n * params.boson_energy;
  }
  sys.pencil = finalize_system(grid, acc, mass, energy, extra,
                               std::move(sector_of), params.n_max + 1);
  return sys;
}

std::pair<Eigen::VectorXcd, double> to_coefficients(const FockChainSystem& sys,
                                                     const FockChainState& state) {
  const auto& grid = sys.pencil.grid;
  if (!(state.grid == grid)) {
    throw GridMismatchError("fock chain state lives on a different grid");
  }
  if (state.n_max() != sys.params.n_max) {
    throw SizingError("fock chain state has the wrong number of sectors");
  }
  const std::size_t nn = grid.size();
  Eigen::VectorXcd x(sys.pencil.dim());
  for (std::size_t id = 0; id < sys.multisets.size(); ++id) {
    auto perm = sys.multisets[id];
    const auto& a = state.sectors[perm.size()];
    Complex acc = 0.0;
    double count = 0.0;
    do {
      acc += a[encode(perm, nn)];
      count += 1.0;
    } while (std::next_permutation(perm.begin(), perm.end()));
    x[static_cast<Eigen::Index>(id)] = acc / count;
  }
  const double total = state.norm_squared();
  const double kept = std::pow(mass_norm(sys.pencil, x), 2);
  const double loss = total > 0.0 ? std::max(0.0, (total - kept) / total) : 0.0;
  return {std::move(x), loss};
}

FockChainState from_coefficients(const FockChainSystem& sys,
                                 const Eigen::VectorXcd& x) {
  if (x.size() != sys.pencil.dim()) {
    throw SizingError("fock chain coefficients have the wrong dimension");
  }
  FockChainState state(sys.pencil.grid, sys.params.n_max);
  const std::size_t nn = state.grid.size();
  for (std::size_t n = 0; n < state.sectors.size(); ++n) {
    std::vector<int> mi(n);
    auto& a = state.sectors[n];
    for (std::size_t flat = 0; flat < a.size(); ++flat) {
      decode(flat, nn, mi);
      const auto id = sys.element_of(mi);
      a[flat] = id < 0 ? Complex(0.0) : x[static_cast<Eigen::Index>(id)];
    }
  }
  return state;
}

FockTrajectory evolve_chain(const FockChainSystem& sys,
                            const FockChainState& initial, double dt,
                            std::size_t n_steps, const EvolveOptions& opts) {
  auto [x0, loss] = to_coefficients(sys, initial);
  MidpointPropagator prop(sys.pencil, dt);
  FockTrajectory out{prop.run(x0, n_steps, opts), {}, {}};
  out.series.projection_loss = loss;
  if (loss > kProjectionWarnThreshold) {
    std::ostringstream msg;
    msg << "initial state projected onto the constrained domain, relative "
           "norm loss "
        << loss;
    out.series.warnings.push_back(msg.str());
  }
  for (const auto& p : out.series.sector_probabilities) {
    double nb = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) nb += static_cast<double>(n) * p[n];
    out.expected_boson_number.push_back(nb);
  }
  for (const auto& snap : out.series.snapshots) {
    out.states.push_back(from_coefficients(sys, snap));
  }
  return out;
}

FockChainState vacuum_state(const FockChainSystem& sys) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(sys.pencil.dim());
  x[0] = 1.0;
  return from_coefficients(sys, x);
}

}  // namespace intop
