#include "intop/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <locale>
#include <ostream>
#include <sstream>

#include <Eigen/Core>

namespace intop::cli {

using nlohmann::json;

namespace {

std::ostringstream csv_stream() {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(17);
  return s;
}

std::string header_comment(const RunConfig& c) {
  auto s = csv_stream();
  s << "# model=" << c.model << " r_max=" << c.r_max << " n_nodes=" << c.n_nodes;
  if (c.model == "toy") {
    s << " mass_m=" << c.toy.mass_m << " energy_e=" << c.toy.energy_e
      << " coupling_g=" << c.toy.coupling_g << " lambda_scale=" << c.toy.lambda_scale
      << " point_coupling_mu=" << c.toy.point_coupling_mu;
  } else if (c.model == "fock") {
    s << " boson_mass=" << c.fock.boson_mass << " source_energy=" << c.fock.source_energy
      << " boson_energy=" << c.fock.boson_energy << " coupling_h=" << c.fock.coupling_h
      << " n_max=" << c.fock.n_max;
  } else {
    s << " fermion_mass=" << c.pair.fermion_mass
      << " boson_channel_energy=" << c.pair.boson_channel_energy
      << " coupling_g=" << c.pair.coupling_g;
  }
  s << '\n';
  return s.str();
}

RadialGrid grid_of(const RunConfig& c, std::size_t n_nodes) { return make_grid(c.r_max, n_nodes); }

struct Spectrum {
  std::vector<double> values;
  std::vector<ToyState> states;  // toy and pair only
};

Spectrum lowest(const RunConfig& c, std::size_t n_nodes, int k) {
  const auto g = grid_of(c, n_nodes);
  Spectrum out;
  if (c.model == "fock") {
    const auto sys = assemble_chain(c.fock, g);
    const auto eig = lowest_generalized_eigenpairs(sys.pencil, k);
    out.values.assign(eig.values.data(), eig.values.data() + eig.values.size());
    return out;
  }
  const ToySystem sys = c.model == "toy" ? assemble(c.toy, g) : assemble_pair(c.pair, g).toy;
  for (auto& p : lowest_eigenpairs(sys, k)) {
    out.values.push_back(p.eigenvalue);
    out.states.push_back(std::move(p.state));
  }
  return out;
}

json identity_breakdown(const VerificationReport& report) {
  json by = json::object();
  for (const auto& r : report.rows) {
    auto& e = by[r.identity];
    if (e.is_null()) e = {{"rows", 0}, {"failures", 0}, {"max_error", 0.0}};
    e["rows"] = e["rows"].get<int>() + 1;
    e["failures"] = e["failures"].get<int>() + (r.pass ? 0 : 1);
    const double err = r.relative ? r.rel_err : r.abs_err;
    if (!std::isfinite(err) || err > e["max_error"].get<double>()) {
      e["max_error"] = std::isfinite(err) ? json(err) : json("nan");
    }
  }
  return by;
}

}  // namespace

double observed_order(double a, double b, double c, double refinement) {
  return std::log(std::abs(a - b) / std::abs(b - c)) / std::log(refinement);
}

CommandResult cmd_verify(const RunConfig& config) {
  config.validate();
  const auto report = run_suite(config.suite);
  std::ostringstream body;
  write_report_csv(body, report);
  CommandResult r;
  r.files.push_back({"verify_report.csv", body.str()});
  r.summary = {{"rows", report.rows.size()},
               {"failures", report.failures()},
               {"identities", identity_breakdown(report)}};
  r.exit_code = report.passed() ? kSuccess : kScientificFailure;
  return r;
}

CommandResult cmd_spectrum(const RunConfig& config) {
  config.validate();
  const auto spec = lowest(config, config.n_nodes, config.spectrum.k);
  auto s = csv_stream();
  s << header_comment(config) << "index,eigenvalue\n";
  for (std::size_t i = 0; i < spec.values.size(); ++i) s << i << ',' << spec.values[i] << '\n';
  CommandResult r;
  r.files.push_back({"spectrum.csv", s.str()});
  if (config.spectrum.profiles) {
    auto p = csv_stream();
    p << header_comment(config) << "state,r,re,im\n";
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
      const auto& prof = spec.states[i].profile;
      for (std::size_t j = 0; j < prof.values.size(); ++j) {
        p << i << ',' << prof.grid.node(j) << ',' << prof.values[j].real() << ','
          << prof.values[j].imag() << '\n';
      }
    }
    r.files.push_back({"spectrum_profiles.csv", p.str()});
  }
  const double min_value = spec.values.empty() ? 0.0 : spec.values.front();
  r.summary = {{"eigenvalues", spec.values}, {"min_eigenvalue", min_value},
               {"positivity_tolerance", 1e-10}};
  r.exit_code = min_value >= -1e-10 ? kSuccess : kScientificFailure;
  return r;
}

CommandResult cmd_evolve(const RunConfig& config) {
  config.validate();
  const auto g = grid_of(config, config.n_nodes);
  const double dt = config.evolve.dt > 0.0 ? config.evolve.dt : default_time_step(g);
  const std::size_t steps = config.evolve.steps;

  Trajectory fwd;
  std::vector<double> n_mean;
  double reversal = 0.0;
  std::string sectors;
  auto reversal_error = [](const Trajectory& f, const Trajectory& b) {
    const auto& x0 = f.snapshots.front();
    return (b.snapshots.back() - x0).norm() / x0.norm();
  };
  if (config.model == "toy") {
    const auto sys = assemble(config.toy, g);
    auto t = evolve(sys, pure_source_state(sys), dt, steps);
    if (config.evolve.reverse) {
      reversal = reversal_error(t.series, evolve(sys, t.states.back(), -dt, steps).series);
    }
    fwd = std::move(t.series);
    sectors = "# p0 = source, p1 = boson\n";
  } else if (config.model == "fock") {
    const auto sys = assemble_chain(config.fock, g);
    auto t = evolve_chain(sys, vacuum_state(sys), dt, steps);
    if (config.evolve.reverse) {
      reversal = reversal_error(t.series, evolve_chain(sys, t.states.back(), -dt, steps).series);
    }
    fwd = std::move(t.series);
    n_mean = std::move(t.expected_boson_number);
    sectors = "# pn = n bosons\n";
  } else {
    const auto sys = assemble_pair(config.pair, g);
    auto t = annihilation_dynamics(sys, pure_boson_state(sys), dt, steps);
    if (config.evolve.reverse) {
      reversal = reversal_error(
          t.series, annihilation_dynamics(sys, t.states.back(), -dt, steps).series);
    }
    fwd = std::move(t.series);
    sectors = "# p0 = boson, p1 = pair\n";
  }

  auto s = csv_stream();
  s << header_comment(config) << sectors << "t,norm";
  const std::size_t n_sectors = fwd.sector_probabilities.front().size();
  for (std::size_t k = 0; k < n_sectors; ++k) s << ",p" << k;
  if (!n_mean.empty()) s << ",n_mean";
  s << '\n';
  double drift = 0.0;
  for (std::size_t i = 0; i < fwd.times.size(); ++i) {
    drift = std::max(drift, std::abs(fwd.norms[i] - fwd.norms[0]));
    if (i % config.evolve.stride != 0 && i + 1 != fwd.times.size()) continue;
    s << fwd.times[i] << ',' << fwd.norms[i];
    for (double p : fwd.sector_probabilities[i]) s << ',' << p;
    if (!n_mean.empty()) s << ',' << n_mean[i];
    s << '\n';
  }

  CommandResult r;
  r.files.push_back({"evolve.csv", s.str()});
  r.summary = {{"dt", dt},
               {"steps", steps},
               {"norm_drift", drift},
               {"norm_tolerance", 1e-10},
               {"projection_loss", fwd.projection_loss},
               {"warnings", fwd.warnings}};
  bool ok = drift <= 1e-10;
  if (config.evolve.reverse) {
    r.summary["reversal_error"] = reversal;
    r.summary["reversal_tolerance"] = 1e-8;
    ok = ok && reversal <= 1e-8;
  }
  r.exit_code = ok ? kSuccess : kScientificFailure;
  return r;
}

CommandResult cmd_convergence(const RunConfig& config) {
  config.validate();
  const auto& levels = config.convergence.levels;
  std::vector<double> values;
  for (std::size_t n : levels) values.push_back(lowest(config, n, 1).values.front());
  const double refinement = double(levels[1] - 1) / double(levels[0] - 1);
  auto s = csv_stream();
  s << header_comment(config) << "n_nodes,h,observable,value,observed_order\n";
  std::vector<double> orders;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    s << levels[i] << ',' << config.r_max / double(levels[i] - 1) << ",lowest_eigenvalue,"
      << values[i] << ',';
    if (i >= 2) {
      orders.push_back(observed_order(values[i - 2], values[i - 1], values[i], refinement));
      s << orders.back();
    }
    s << '\n';
  }
  CommandResult r;
  r.files.push_back({"convergence.csv", s.str()});
  r.summary = {{"levels", levels}, {"values", values}, {"observed_orders", orders}};
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interaction-operator lab: identity verification, spectra, dynamics, convergence"};
  app.footer("Default configuration (JSON):\n" + to_json(RunConfig{}).dump(2));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<CLI::App*> commands;
  for (const char* name : {"verify", "spectrum", "evolve", "convergence"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file (defaults if omitted)");
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", seed, "Override suite.seed");
    sub->add_option("--threads", threads, "Override suite.quadrature.threads")
        ->check(CLI::PositiveNumber);
    commands.push_back(sub);
  }
  commands[0]->description("Run the identity battery; exit 1 if any row fails");
  commands[1]->description("Lowest generalized eigenvalues of the selected model");
  commands[2]->description("Implicit-midpoint dynamics from the bare sector");
  commands[3]->description("Lowest eigenvalue over refinement levels with observed order");
  auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  if (defaults->parsed()) {
    out << to_json(RunConfig{}).dump(2) << '\n';
    return kSuccess;
  }

  std::string command;
  for (auto* sub : commands) {
    if (sub->parsed()) command = sub->get_name();
  }

  RunConfig config;
  CommandResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!config_path.empty()) config = load_config(config_path);
    auto* sub = app.get_subcommand(command);
    if (sub->count("--seed")) config.suite.seed = seed;
    if (sub->count("--threads")) config.suite.quad.threads = threads;
    config.validate();
    if (command == "verify") result = cmd_verify(config);
    if (command == "spectrum") result = cmd_spectrum(config);
    if (command == "evolve") result = cmd_evolve(config);
    if (command == "convergence") result = cmd_convergence(config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SizingError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kScientificFailure;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json meta = {{"command", command},
               {"versions",
                {{"intop", INTOP_VERSION},
                 {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                               std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION)},
                 {"nlohmann_json", json::meta()["version"]["string"]},
                 {"cli11", CLI11_VERSION}}},
               {"config", to_json(config)},
               {"timings", {{"compute_seconds", seconds}}},
               {"summary", result.summary},
               {"exit_code", result.exit_code},
               {"passed", result.exit_code == kSuccess}};
  json names = json::array();
  for (const auto& f : result.files) names.push_back(f.name);
  meta["outputs"] = names;

  try {
    std::filesystem::create_directories(out_dir);
    for (const auto& f : result.files) {
      std::ofstream o(std::filesystem::path(out_dir) / f.name, std::ios::binary);
      o << f.contents;
      if (!o) throw std::runtime_error("cannot write " + f.name);
    }
    std::ofstream o(std::filesystem::path(out_dir) / "run.json", std::ios::binary);
    o << meta.dump(2) << '\n';
    if (!o) throw std::runtime_error("cannot write run.json");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  out << command << ": " << (result.exit_code == kSuccess ? "pass" : "FAIL") << ", outputs in "
      << out_dir << '\n';
  return result.exit_code;
}

}  // namespace intop::cli
