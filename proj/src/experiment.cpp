#include "pftube/experiment.hpp"

#include <cmath>
#include <stdexcept>

#include "pftube/concentration.hpp"
#include "pftube/operator.hpp"
#include "pftube/plot.hpp"
#include "pftube/random.hpp"

namespace pftube::experiment {

namespace {

constexpr std::uint64_t kBootstrapTag = 0xB0075000;
constexpr std::uint64_t kOracleTag = 0x0AC1E000;

InitialSampler sampler_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "gaussian") return GaussianInit{j.value("mean", 0.0), j.value("variance", 1.0)};
  if (type == "uniform") return UniformInit{j.at("lower").get<double>(), j.at("upper").get<double>()};
  if (type == "point") return PointInit{j.at("value").get<double>()};
  throw std::invalid_argument("unknown initial distribution type '" + type + "'");
}

Json sampler_to_json(const InitialSampler& s) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GaussianInit>) return {{"type", "gaussian"}, {"mean", v.mean}, {"variance", v.variance}};
        else if constexpr (std::is_same_v<T, UniformInit>) return {{"type", "uniform"}, {"lower", v.lower}, {"upper", v.upper}};
        else return {{"type", "point"}, {"value", v.value}};
      },
      s);
}

fs::path ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io::IoError("cannot create output directory: " + dir.string());
  return dir;
}

PairedDataset dataset_for(const ExperimentConfig& cfg) {
  if (cfg.dataset) return io::read_dataset(*cfg.dataset);
  return training_data(cfg, cfg.m);
}

std::uint64_t bootstrap_seed(const ExperimentConfig& cfg, Index m) {
  return derive_seed(cfg.seed, kBootstrapTag + static_cast<std::uint64_t>(m));
}

Json kernel_json(const KernelSpec& spec, const ExperimentConfig& cfg) {
  return {{"kernel_family", "gaussian-rbf"},
          {"bandwidth", spec.bandwidth},
          {"bandwidth_rule", cfg.bandwidth ? "fixed" : "median"}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  ExperimentConfig cfg;
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      field = j.at(key).get<std::decay_t<decltype(field)>>();
    } else {
      cfg.defaulted.emplace_back(key);
    }
  };
  if (j.contains("model")) {
    const Json& mj = j.at("model");
    cfg.model.type = mj.value("type", std::string("ou"));
    cfg.model.alpha = mj.value("alpha", 1.0);
    cfg.model.beta_temp = mj.value("beta_temp", 1.0);
    cfg.model.potential = mj.value("potential", std::vector<double>{});
    cfg.model.dim = mj.value("dim", Index{1});
  } else {
    cfg.defaulted.emplace_back("model");
  }
  take("lag", cfg.lag);
  take("dt", cfg.dt);
  take("m", cfg.m);
  take("lambda", cfg.lambda);
  if (j.contains("bandwidth") && j.at("bandwidth").is_number()) {
    cfg.bandwidth = j.at("bandwidth").get<double>();
  } else if (j.contains("bandwidth") && j.at("bandwidth") != "median") {
    throw std::invalid_argument("bandwidth must be a number or \"median\"");
  } else if (!j.contains("bandwidth")) {
    cfg.defaulted.emplace_back("bandwidth");
  }
  take("m_b", cfg.m_b);
  take("alpha_conf", cfg.alpha_conf);
  take("T", cfg.horizon);
  take("rho0", cfg.rho0);
  if (j.contains("initial")) {
    cfg.initial = sampler_from_json(j.at("initial"));
  } else {
    cfg.defaulted.emplace_back("initial");
  }
  take("seed", cfg.seed);
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  take("m_list", cfg.m_list);
  take("oracle_m_list", cfg.oracle_m_list);
  if (j.contains("oracle")) {
    cfg.oracle_samples = j.at("oracle").value("M", cfg.oracle_samples);
    cfg.oracle_trials = j.at("oracle").value("trials", cfg.oracle_trials);
  }
  if (j.contains("bound")) {
    const auto b = j.at("bound").get<std::string>();
    if (b == "bootstrap") cfg.bound = BoundSource::bootstrap;
    else if (b == "bernstein") cfg.bound = BoundSource::bernstein;
    else throw std::invalid_argument("bound must be \"bootstrap\" or \"bernstein\"");
  }
  cfg.bernstein_delta = j.value("bernstein_delta", cfg.bernstein_delta);
  cfg.zero_model_error = j.value("zero_model_error", false);
  if (j.contains("dataset")) cfg.dataset = fs::path(j.at("dataset").get<std::string>());
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) { return from_json(io::read_json(path)); }

Json ExperimentConfig::to_json() const {
  Json model_json = {{"type", model.type}, {"alpha", model.alpha}, {"beta_temp", model.beta_temp}, {"dim", model.dim}};
  if (!model.potential.empty()) model_json["potential"] = model.potential;
  Json j = {{"model", model_json},
            {"lag", lag},
            {"dt", dt},
            {"m", m},
            {"lambda", lambda},
            {"bandwidth", bandwidth ? Json(*bandwidth) : Json("median")},
            {"m_b", m_b},
            {"alpha_conf", alpha_conf},
            {"T", horizon},
            {"rho0", rho0},
            {"initial", sampler_to_json(initial)},
            {"seed", seed},
            {"output_dir", output_dir.string()},
            {"m_list", m_list},
            {"oracle_m_list", oracle_m_list},
            {"oracle", {{"M", oracle_samples}, {"trials", oracle_trials}}},
            {"bound", bound == BoundSource::bootstrap ? "bootstrap" : "bernstein"},
            {"bernstein_delta", bernstein_delta},
            {"zero_model_error", zero_model_error}};
  if (dataset) j["dataset"] = dataset->string();
  return j;
}

void ExperimentConfig::validate() const {
  if (!(lag > 0.0)) throw std::invalid_argument("lag must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (bandwidth && !(*bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (m_b < 1) throw std::invalid_argument("m_b must be >= 1");
  if (!(alpha_conf > 0.0 && alpha_conf < 1.0)) throw std::invalid_argument("alpha_conf must lie in (0, 1)");
  if (horizon < 1) throw std::invalid_argument("T must be >= 1");
  if (!(rho0 >= 0.0)) throw std::invalid_argument("rho0 must be >= 0");
  if (oracle_samples < 100) throw std::invalid_argument("oracle M must be >= 100");
  if (oracle_trials < 1) throw std::invalid_argument("oracle trials must be >= 1");
  if (!(bernstein_delta > 0.0 && bernstein_delta < 1.0)) throw std::invalid_argument("bernstein_delta must lie in (0, 1)");
  for (Index v : m_list) if (v < 2) throw std::invalid_argument("m_list entries must be >= 2");
  for (Index v : oracle_m_list) if (v < 2) throw std::invalid_argument("oracle_m_list entries must be >= 2");
  pftube::validate(initial);
  (void)make_model();
}

SdeModel ExperimentConfig::make_model() const {
  if (model.type == "ou") return SdeModel::ornstein_uhlenbeck(model.alpha, model.beta_temp, model.dim);
  if (model.type == "double_well") return SdeModel::double_well(model.beta_temp, model.dim);
  if (model.type == "langevin") return SdeModel::langevin(model.potential, model.beta_temp, model.dim);
  throw std::invalid_argument("unknown model type '" + model.type + "'");
}

LogLogFit fit_log_log(const std::vector<double>& ms, const std::vector<double>& deltas) {
  if (ms.size() != deltas.size() || ms.size() < 2) throw std::invalid_argument("fit_log_log: need >= 2 paired values");
  LogLogFit out;
  const auto n = static_cast<double>(ms.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (!(ms[i] > 0.0) || !(deltas[i] > 0.0)) {
      out.degenerate = true;
      return out;
    }
    sx += std::log(ms[i]);
    sy += std::log(deltas[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double dx = std::log(ms[i]) - mx, dy = std::log(deltas[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    out.degenerate = true;
    out.intercept = my;
    return out;
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  return out;
}

PairedDataset training_data(const ExperimentConfig& cfg, Index m) {
  return simulate_pairs(cfg.make_model(), cfg.initial, cfg.lag, m, cfg.dt, derive_seed(cfg.seed, static_cast<std::uint64_t>(m)));
}

KernelSpec kernel_for(const ExperimentConfig& cfg, const PairedDataset& data) {
  return KernelSpec::gaussian(cfg.bandwidth ? *cfg.bandwidth : median_heuristic_bandwidth(data.x));
}

SimulateResult cmd_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = ensure_dir(cfg.output_dir);
  PairedDataset data = training_data(cfg, cfg.m);
  const fs::path csv = dir / "dataset.csv";
  io::write_dataset(csv, data,
                    {{"master_seed", cfg.seed},
                     {"transition", cfg.make_model().ou ? "exact" : "euler-maruyama"},
                     {"initial", sampler_to_json(cfg.initial)}});
  return {csv, std::move(data)};
}

BootstrapResult cmd_bootstrap(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = ensure_dir(cfg.output_dir);
  const PairedDataset data = dataset_for(cfg);
  const KernelSpec spec = kernel_for(cfg, data);
  const std::uint64_t seed = bootstrap_seed(cfg, data.size());
  BootstrapResult result;
  result.summary = bootstrap_deviation_quantile(data, cfg.lambda, spec, cfg.m_b, cfg.alpha_conf, seed);
  result.m = data.size();
  result.bandwidth = spec.bandwidth;
  result.deviations_csv = dir / "deviations.csv";
  result.summary_json = dir / "bootstrap.json";
  io::write_deviations_csv(result.deviations_csv, result.summary.deviations);
  Json summary = {{"m", result.m},
                  {"m_b", cfg.m_b},
                  {"alpha", cfg.alpha_conf},
                  {"delta", result.summary.quantile_delta},
                  {"quantile_rank", quantile_rank(cfg.m_b, cfg.alpha_conf)},
                  {"deviations_csv_path", "deviations.csv"},
                  {"seed", seed},
                  {"lambda", cfg.lambda}};
  summary.update(kernel_json(spec, cfg));
  io::write_json(result.summary_json, summary);
  return result;
}

RateResult cmd_rate(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.m_list.size() < 3) throw std::invalid_argument("rate: m_list needs at least 3 entries");
  const fs::path dir = ensure_dir(cfg.output_dir);
  RateResult result;
  std::vector<double> ms, deltas;
  for (Index m : cfg.m_list) {
    const PairedDataset data = training_data(cfg, m);
    const KernelSpec spec = kernel_for(cfg, data);
    const auto summary = bootstrap_deviation_quantile(data, cfg.lambda, spec, cfg.m_b, cfg.alpha_conf, bootstrap_seed(cfg, m));
    result.rows.push_back({m, summary.quantile_delta});
    ms.push_back(static_cast<double>(m));
    deltas.push_back(summary.quantile_delta);
  }
  result.fit = fit_log_log(ms, deltas);

  io::CsvTable table{{"m", "delta"}, {}};
  for (const auto& r : result.rows) table.rows.push_back({static_cast<double>(r.m), r.delta});
  io::write_csv(dir / "rate.csv", table);
  io::write_json(dir / "slope.json", {{"slope", result.fit.slope},
                                      {"intercept", result.fit.intercept},
                                      {"degenerate", result.fit.degenerate},
                                      {"m_b", cfg.m_b},
                                      {"alpha", cfg.alpha_conf},
                                      {"lambda", cfg.lambda},
                                      {"m_list", cfg.m_list}});
  plot::Series points{"bootstrap delta", ms, deltas, true};
  plot::Series line{"fit", ms, {}, false};
  for (double m : ms) line.y.push_back(std::exp(result.fit.intercept + result.fit.slope * std::log(m)));
  plot::write_svg(dir / "rate.svg", {"Bootstrap deviation quantile vs training size", "m", "delta", true, true},
                  {points, line});
  return result;
}

double oracle_deviation(const FittedOperator& op, const PairedDataset& fresh) {
  return mmd(embed_sample(fresh.y), pushforward(op, embed_sample(fresh.x)), op.spec());
}

std::vector<OracleRow> cmd_oracle_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = ensure_dir(cfg.output_dir);
  const SdeModel model = cfg.make_model();
  std::vector<OracleRow> rows;
  for (Index m : cfg.oracle_m_list) {
    const PairedDataset data = training_data(cfg, m);
    const KernelSpec spec = kernel_for(cfg, data);
    const FittedOperator op = fit(data, cfg.lambda, spec);
    const auto summary = bootstrap_deviation_quantile(data, cfg.lambda, spec, cfg.m_b, cfg.alpha_conf, bootstrap_seed(cfg, m));
    double oracle = 0.0;
    for (Index trial = 0; trial < cfg.oracle_trials; ++trial) {
      const auto seed = derive_seed(cfg.seed, kOracleTag + static_cast<std::uint64_t>(m) * 1000 + static_cast<std::uint64_t>(trial));
      const PairedDataset fresh = simulate_pairs(model, cfg.initial, cfg.lag, cfg.oracle_samples, cfg.dt, seed);
      oracle += oracle_deviation(op, fresh);
    }
    rows.push_back({m, summary.quantile_delta, oracle / static_cast<double>(cfg.oracle_trials)});
  }
  io::CsvTable table{{"m", "delta", "oracle_mmd"}, {}};
  std::vector<double> ms, deltas, oracles;
  for (const auto& r : rows) {
    table.rows.push_back({static_cast<double>(r.m), r.delta, r.oracle_mmd});
    ms.push_back(static_cast<double>(r.m));
    deltas.push_back(r.delta);
    oracles.push_back(r.oracle_mmd);
  }
  io::write_csv(dir / "oracle.csv", table);
  plot::write_svg(dir / "oracle.svg", {"Bootstrap quantile vs large-sample oracle", "m", "deviation", true, true},
                  {{"bootstrap delta", ms, deltas, true}, {"oracle MMD", ms, oracles, true}});
  return rows;
}

TubeResult cmd_tube(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = ensure_dir(cfg.output_dir);
  const PairedDataset data = dataset_for(cfg);
  const KernelSpec spec = kernel_for(cfg, data);
  const FittedOperator op = fit(data, cfg.lambda, spec);

  OperatorNorms norms;
  norms.e_norm = operator_norm(op);
  std::string f_source;
  Json f_detail = Json::object();
  if (cfg.zero_model_error) {
    norms.f_norm = 0.0;
    f_source = "zero";
  } else if (cfg.bound == BoundSource::bootstrap) {
    const auto summary =
        bootstrap_deviation_quantile(data, cfg.lambda, spec, cfg.m_b, cfg.alpha_conf, bootstrap_seed(cfg, data.size()));
    norms.f_norm = summary.quantile_delta;
    f_source = "bootstrap";
    f_detail = {{"m_b", cfg.m_b}, {"alpha", cfg.alpha_conf}};
  } else {
    const MomentEstimates lagged = estimate_moments(data, spec);
    const MomentEstimates same_time = estimate_moments(PairedDataset(data.x, data.x, data.lag), spec);
    norms.f_norm = bernstein_bound(cfg.lambda, data.size(), cfg.bernstein_delta, lagged.sigma_t, same_time.sigma_t,
                                   lagged.hs_norm_cxy, default_moment_constant(spec));
    f_source = "bernstein";
    f_detail = {{"delta", cfg.bernstein_delta},
                {"sigma_t", lagged.sigma_t},
                {"sigma_0", same_time.sigma_t},
                {"hs_norm_cyx", lagged.hs_norm_cxy},
                {"moment_constant", default_moment_constant(spec)}};
  }

  const Embedding initial = embed_sample(data.x);
  AmbiguityTube tube = propagate_tube(op, initial, cfg.rho0, cfg.horizon, norms);

  io::write_tube_csv(dir / "tube.csv", tube);
  io::write_tube_weights_csv(dir / "tube_weights.csv", tube);
  std::vector<double> physical;
  for (Index t = 0; t <= cfg.horizon; ++t) physical.push_back(static_cast<double>(t) * data.lag);
  Json assumed = Json::array();
  for (const auto& key : cfg.defaulted) {
    if (key == "T" || key == "lag" || key == "bandwidth") assumed.push_back(key);
  }
  if (!cfg.bandwidth && !assumed.contains("bandwidth")) assumed.push_back("bandwidth");
  Json meta = {{"E", norms.e_norm},
               {"F", norms.f_norm},
               {"F_source", f_source},
               {"F_detail", f_detail},
               {"rho0", cfg.rho0},
               {"T", cfg.horizon},
               {"lag", data.lag},
               {"physical_time", physical},
               {"m", data.size()},
               {"lambda", cfg.lambda},
               {"assumed_defaults", assumed}};
  meta.update(kernel_json(spec, cfg));
  io::write_json(dir / "tube.json", meta);

  std::vector<double> ts;
  for (Index t = 0; t <= cfg.horizon; ++t) ts.push_back(static_cast<double>(t));
  plot::write_svg(dir / "tube.svg", {"Multistep MMD ambiguity radius", "step t", "radius", false, false},
                  {{"radius", ts, tube.radii(), true}, {"embedding norm", ts, tube.embedding_norms(), true}});
  return {std::move(tube), norms, spec.bandwidth};
}

Json cmd_reproduce_ou(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path root = ensure_dir(cfg.output_dir);
  auto stage = [&](const char* name) {
    ExperimentConfig c = cfg;
    c.output_dir = root / name;
    return c;
  };

  const auto sim = cmd_simulate(stage("simulate"));
  ExperimentConfig boot_cfg = stage("bootstrap");
  boot_cfg.dataset = sim.csv;
  const auto boot = cmd_bootstrap(boot_cfg);
  const auto rate = cmd_rate(stage("rate"));
  const auto oracle = cmd_oracle_compare(stage("oracle"));
  ExperimentConfig tube_cfg = stage("tube");
  tube_cfg.dataset = sim.csv;
  const auto tube = cmd_tube(tube_cfg);

  Json oracle_json = Json::array();
  for (const auto& r : oracle) oracle_json.push_back({{"m", r.m}, {"delta", r.delta}, {"oracle_mmd", r.oracle_mmd}});
  Json summary = {{"config", cfg.to_json()},
                  {"bootstrap_delta", boot.summary.quantile_delta},
                  {"rate_slope", rate.fit.slope},
                  {"rate_degenerate", rate.fit.degenerate},
                  {"oracle", oracle_json},
                  {"tube_E", tube.norms.e_norm},
                  {"tube_F", tube.norms.f_norm},
                  {"tube_final_radius", tube.tube.steps.back().radius}};
  io::write_json(root / "reproduce.json", summary);
  return summary;
}

}  // namespace pftube::experiment
