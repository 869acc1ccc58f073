#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pftube/bootstrap.hpp"
#include "pftube/io.hpp"
#include "pftube/sde.hpp"
#include "pftube/tube.hpp"

namespace pftube::experiment {

namespace fs = std::filesystem;
using io::Json;

enum class BoundSource { bootstrap, bernstein };

struct ModelConfig {
  std::string type = "ou";  // "ou" | "langevin" | "double_well"
  double alpha = 1.0;
  double beta_temp = 1.0;
  std::vector<double> potential;  // ascending coefficients, langevin only
  Index dim = 1;
};

/// Everything a command needs. Loaded from a JSON file; any key may be omitted.
struct ExperimentConfig {
  ModelConfig model;
  double lag = 0.1;
  double dt = 1e-3;
  Index m = 250;
  double lambda = 0.01;
  std::optional<double> bandwidth;  // empty: median heuristic on training inputs
  Index m_b = 200;
  double alpha_conf = 0.05;
  Index horizon = 20;
  double rho0 = 0.1;
  InitialSampler initial = GaussianInit{0.5, 2.0};
  std::uint64_t seed = 7;
  fs::path output_dir = "out";
  std::vector<Index> m_list{50, 100, 200, 400, 800};
  std::vector<Index> oracle_m_list{100, 400, 1600};
  Index oracle_samples = 5000;
  Index oracle_trials = 1;
  BoundSource bound = BoundSource::bootstrap;
  double bernstein_delta = 0.05;
  bool zero_model_error = false;
  std::optional<fs::path> dataset;  // reuse an existing dataset CSV instead of simulating
  /// Keys that were absent from the loaded JSON and took tool defaults.
  std::vector<std::string> defaulted;

  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig load(const fs::path& path);
  Json to_json() const;
  void validate() const;
  SdeModel make_model() const;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;
};

/// Ordinary least squares of log(delta) on log(m). Non-positive deltas or zero
/// spread in either coordinate yield slope 0 with `degenerate` set.
LogLogFit fit_log_log(const std::vector<double>& ms, const std::vector<double>& deltas);

/// Training set of size m for `cfg`; the same (cfg.seed, m) always gives the same data.
PairedDataset training_data(const ExperimentConfig& cfg, Index m);
KernelSpec kernel_for(const ExperimentConfig& cfg, const PairedDataset& data);

struct SimulateResult {
  fs::path csv;
  PairedDataset data;
};
SimulateResult cmd_simulate(const ExperimentConfig& cfg);

struct BootstrapResult {
  BootstrapSummary summary;
  Index m = 0;
  double bandwidth = 0.0;
  fs::path deviations_csv;
  fs::path summary_json;
};
BootstrapResult cmd_bootstrap(const ExperimentConfig& cfg);

struct RateRow {
  Index m = 0;
  double delta = 0.0;
};
struct RateResult {
  std::vector<RateRow> rows;
  LogLogFit fit;
};
RateResult cmd_rate(const ExperimentConfig& cfg);

struct OracleRow {
  Index m = 0;
  double delta = 0.0;
  double oracle_mmd = 0.0;
};
std::vector<OracleRow> cmd_oracle_compare(const ExperimentConfig& cfg);

/// MMD(avg Phi(X'_T), P_hat avg Phi(X'_0)) over `fresh` independent pairs.
double oracle_deviation(const FittedOperator& op, const PairedDataset& fresh);

struct TubeResult {
  AmbiguityTube tube;
  OperatorNorms norms;
  double bandwidth = 0.0;
};
TubeResult cmd_tube(const ExperimentConfig& cfg);

/// simulate -> bootstrap -> rate -> oracle-compare -> tube, each in its own
/// subdirectory of cfg.output_dir.
Json cmd_reproduce_ou(const ExperimentConfig& cfg);

}  // namespace pftube::experiment
