#pragma once

// Batch front end. Every command computes its outputs in memory first; files
// are written only after the whole run succeeded.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intop/errors.hpp"
#include "intop/fock_chain.hpp"
#include "intop/identities.hpp"
#include "intop/pair_model.hpp"
#include "intop/toy_model.hpp"

namespace intop::cli {

enum ExitCode : int { kSuccess = 0, kScientificFailure = 1, kUsageError = 2 };

/// Malformed or inadmissible configuration; maps to kUsageError.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  /// toy | fock | pair
  std::string model = "toy";
  double r_max = 8.0;
  std::size_t n_nodes = 129;
  ToyParams toy;
  FockChainParams fock;
  PairParams pair;
  SuiteConfig suite;

  struct Spectrum {
    int k = 5;
    bool profiles = false;
  } spectrum;

  struct Evolve {
    /// 0 selects default_time_step(grid).
    double dt = 0.0;
    std::size_t steps = 1000;
    /// Write every stride-th step.
    std::size_t stride = 10;
    /// Run backwards from the final state and report the reversal error.
    bool reverse = true;
  } evolve;

  struct Convergence {
    std::vector<std::size_t> levels = {65, 129, 257};
  } convergence;

  /// Runs every module precondition; throws ConfigError.
  void validate() const;
};

/// Unknown keys and wrong types are rejected with the offending field path.
RunConfig parse_config(const nlohmann::json& doc);
/// Parse errors carry the line and column reported by the JSON reader.
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

struct OutputFile {
  std::string name;
  std::string contents;
};

struct CommandResult {
  int exit_code = kSuccess;
  std::vector<OutputFile> files;
  nlohmann::json summary;
};

CommandResult cmd_verify(const RunConfig& config);
CommandResult cmd_spectrum(const RunConfig& config);
CommandResult cmd_evolve(const RunConfig& config);
CommandResult cmd_convergence(const RunConfig& config);

/// Observed order log(|a - b| / |b - c|) / log(h_a / h_b) of one refinement
/// triplet on geometrically refined grids.
double observed_order(double a, double b, double c, double refinement);

/// Full command line: `<verify|spectrum|evolve|convergence> --config <path>
/// --out <dir> [--seed N] [--threads N]`, plus `defaults` to print the
/// default configuration.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace intop::cli
