// pftube: experiment runner for embedded Perron-Frobenius operators and
// multistep MMD ambiguity tubes.
//
//   pftube <subcommand> [--config file.json] [overrides]
//
// Exit code 0 on success; otherwise a JSON error record is written to stderr.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pftube/experiment.hpp"
#include "pftube/parallel.hpp"

namespace {

using pftube::experiment::BoundSource;
using pftube::experiment::ExperimentConfig;
using pftube::io::Json;

struct Overrides {
  std::string config;
  std::optional<double> lambda;
  std::optional<pftube::Index> m;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> bound;
  std::optional<std::string> out;
  std::optional<pftube::Index> m_b;
  std::optional<double> alpha_conf;
  std::optional<pftube::Index> horizon;
  std::optional<double> rho0;
  std::optional<double> lag;
  std::optional<std::string> bandwidth;
  std::optional<std::string> dataset;
  std::vector<pftube::Index> m_list;
  std::optional<pftube::Index> oracle_samples;
  bool zero_f = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment configuration");
  cmd->add_option("--lambda", o.lambda, "Regularization lambda");
  cmd->add_option("--m", o.m, "Number of training pairs");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--bound", o.bound, "Source of F: bootstrap | bernstein")->check(CLI::IsMember({"bootstrap", "bernstein"}));
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--mb", o.m_b, "Bootstrap replicates");
  cmd->add_option("--alpha-conf", o.alpha_conf, "Bootstrap confidence alpha");
  cmd->add_option("--T", o.horizon, "Tube horizon in steps");
  cmd->add_option("--rho0", o.rho0, "Initial ambiguity radius");
  cmd->add_option("--lag", o.lag, "Lag time between paired samples");
  cmd->add_option("--bandwidth", o.bandwidth, "Kernel bandwidth or 'median'");
  cmd->add_option("--dataset", o.dataset, "Use an existing dataset CSV");
  cmd->add_option("--m-list", o.m_list, "Training sizes for sweeps")->delimiter(',');
  cmd->add_option("--oracle-M", o.oracle_samples, "Fresh pairs for the oracle comparison");
  cmd->add_flag("--zero-f", o.zero_f, "Force the model-error term F to 0");
}

ExperimentConfig resolve(const Overrides& o, const std::string& subcommand) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig::from_json(Json::object()) : ExperimentConfig::load(o.config);
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.m) cfg.m = *o.m;
  if (o.seed) cfg.seed = *o.seed;
  if (o.bound) cfg.bound = *o.bound == "bernstein" ? BoundSource::bernstein : BoundSource::bootstrap;
  if (o.out) cfg.output_dir = *o.out;
  if (o.m_b) cfg.m_b = *o.m_b;
  if (o.alpha_conf) cfg.alpha_conf = *o.alpha_conf;
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.rho0) cfg.rho0 = *o.rho0;
  if (o.lag) cfg.lag = *o.lag;
  if (o.bandwidth) {
    if (*o.bandwidth == "median") cfg.bandwidth.reset();
    else cfg.bandwidth = std::stod(*o.bandwidth);
  }
  if (o.dataset) cfg.dataset = *o.dataset;
  if (!o.m_list.empty()) {
    if (subcommand == "oracle-compare") cfg.oracle_m_list = o.m_list;
    else cfg.m_list = o.m_list;
  }
  if (o.oracle_samples) cfg.oracle_samples = *o.oracle_samples;
  if (o.zero_f) cfg.zero_model_error = true;
  return cfg;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", message}, {"kind", kind}}.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  pftube::configure_threads_from_env();
  CLI::App app{"Embedded Perron-Frobenius operators and multistep MMD ambiguity tubes"};
  app.require_subcommand(1);
  Overrides o;
  for (const char* name : {"simulate", "bootstrap", "rate", "oracle-compare", "tube", "reproduce-ou"}) {
    add_common(app.add_subcommand(name), o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  namespace ex = pftube::experiment;
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig cfg = resolve(o, sub);
    Json report;
    if (sub == "simulate") {
      const auto r = ex::cmd_simulate(cfg);
      report = {{"dataset_csv", r.csv.string()}, {"m", r.data.size()}};
    } else if (sub == "bootstrap") {
      const auto r = ex::cmd_bootstrap(cfg);
      report = {{"m", r.m}, {"delta", r.summary.quantile_delta}, {"summary_json", r.summary_json.string()}};
    } else if (sub == "rate") {
      const auto r = ex::cmd_rate(cfg);
      report = {{"slope", r.fit.slope}, {"degenerate", r.fit.degenerate}};
      if (r.fit.degenerate) report["warning"] = "degenerate log-log fit; slope reported as 0";
    } else if (sub == "oracle-compare") {
      report = Json::array();
      for (const auto& row : ex::cmd_oracle_compare(cfg)) {
        report.push_back({{"m", row.m}, {"delta", row.delta}, {"oracle_mmd", row.oracle_mmd}});
      }
    } else if (sub == "tube") {
      const auto r = ex::cmd_tube(cfg);
      report = {{"E", r.norms.e_norm}, {"F", r.norms.f_norm}, {"final_radius", r.tube.steps.back().radius}};
    } else {
      report = ex::cmd_reproduce_ou(cfg);
      report.erase("config");
    }
    std::cout << report.dump(2) << std::endl;
  } catch (const pftube::io::IoError& e) {
    return fail("io", e.what());
  } catch (const pftube::NumericalError& e) {
    return fail("numerical", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail("error", e.what());
  }
  return 0;
}
