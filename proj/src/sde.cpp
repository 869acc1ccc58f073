#include "pftube/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace pftube {

namespace {

// derivative of a polynomial given by ascending coefficients
double poly_derivative(const std::vector<double>& coeffs, double x) {
  double result = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) result = result * x + static_cast<double>(k) * coeffs[k];
  return result;
}

Eigen::VectorXd draw_state(const InitialSampler& sampler, Index dim, Rng& rng) {
  Eigen::VectorXd x(dim);
  for (Index k = 0; k < dim; ++k) x(k) = draw(sampler, rng);
  return x;
}

}  // namespace

SdeModel SdeModel::ornstein_uhlenbeck(double alpha, double beta_temp, Index dim) {
  if (!(alpha > 0.0) || !(beta_temp > 0.0)) throw std::invalid_argument("OU requires alpha > 0 and beta_temp > 0");
  if (dim < 1) throw std::invalid_argument("state dimension must be >= 1");
  SdeModel model;
  model.name = "ou";
  model.drift = [alpha](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -alpha * x; };
  model.diffusion_const = std::sqrt(2.0 / beta_temp);
  model.dim = dim;
  model.ou = OuParams{alpha, beta_temp};
  model.beta_temp = beta_temp;
  return model;
}

SdeModel SdeModel::langevin(std::vector<double> potential_coeffs, double beta_temp, Index dim) {
  if (!(beta_temp > 0.0)) throw std::invalid_argument("Langevin requires beta_temp > 0");
  if (dim < 1) throw std::invalid_argument("state dimension must be >= 1");
  if (potential_coeffs.empty()) throw std::invalid_argument("potential needs at least one coefficient");
  SdeModel model;
  model.name = "langevin";
  model.drift = [coeffs = potential_coeffs](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out(x.size());
    for (Index k = 0; k < x.size(); ++k) out(k) = -poly_derivative(coeffs, x(k));
    return out;
  };
  model.diffusion_const = std::sqrt(2.0 / beta_temp);
  model.dim = dim;
  model.potential = std::move(potential_coeffs);
  model.beta_temp = beta_temp;
  return model;
}

SdeModel SdeModel::double_well(double beta_temp, Index dim) {
  auto model = langevin({1.0, 0.0, -2.0, 0.0, 1.0}, beta_temp, dim);
  model.name = "double_well";
  return model;
}

void validate(const InitialSampler& sampler) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianInit>) {
          if (!(s.variance >= 0.0) || !std::isfinite(s.mean)) throw std::invalid_argument("gaussian initial needs variance >= 0");
        } else if constexpr (std::is_same_v<T, UniformInit>) {
          if (!(s.lower < s.upper)) throw std::invalid_argument("uniform initial needs lower < upper");
        } else {
          if (!std::isfinite(s.value)) throw std::invalid_argument("point initial must be finite");
        }
      },
      sampler);
}

double draw(const InitialSampler& sampler, Rng& rng) {
  return std::visit(
      [&rng](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianInit>) {
          std::normal_distribution<double> dist(s.mean, std::sqrt(s.variance));
          return dist(rng);
        } else if constexpr (std::is_same_v<T, UniformInit>) {
          std::uniform_real_distribution<double> dist(s.lower, s.upper);
          return dist(rng);
        } else {
          return s.value;
        }
      },
      sampler);
}

PairedDataset::PairedDataset(PointSet x_, PointSet y_, double lag_, std::uint64_t seed_, double dt_,
                             std::string model_name_)
    : x(std::move(x_)), y(std::move(y_)), lag(lag_), seed(seed_), dt(dt_), model_name(std::move(model_name_)) {
  if (x.size() != y.size() || x.dim() != y.dim()) {
    throw std::invalid_argument("paired dataset: x and y must have equal length and dimension");
  }
  if (!(lag > 0.0)) throw std::invalid_argument("paired dataset: lag must be positive");
}

PairedDataset PairedDataset::gather(std::span<const Index> indices) const {
  return PairedDataset(x.gather(indices), y.gather(indices), lag, seed, dt, model_name);
}

double ou_exact_step(double x0, double lag, double alpha, double beta_temp, Rng& rng) {
  if (!(lag > 0.0) || !(alpha > 0.0) || !(beta_temp > 0.0)) {
    throw std::invalid_argument("ou_exact_step requires lag, alpha, beta_temp > 0");
  }
  const double mean = x0 * std::exp(-alpha * lag);
  const double variance = -std::expm1(-2.0 * alpha * lag) / (alpha * beta_temp);
  std::normal_distribution<double> noise(0.0, 1.0);
  return mean + std::sqrt(variance) * noise(rng);
}

PointSet euler_maruyama(const SdeModel& model, const Eigen::VectorXd& x0, double dt, Index steps, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_maruyama: dt must be positive");
  if (steps < 1) throw std::invalid_argument("euler_maruyama: steps must be >= 1");
  if (model.diffusion_const < 0.0) throw std::invalid_argument("euler_maruyama: diffusion_const must be >= 0");
  Eigen::MatrixXd path(steps + 1, x0.size());
  path.row(0) = x0.transpose();
  Eigen::VectorXd x = x0;
  const double noise_scale = model.diffusion_const * std::sqrt(dt);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Index k = 0; k < steps; ++k) {
    const Eigen::VectorXd b = model.drift ? model.drift(x) : Eigen::VectorXd::Zero(x.size());
    if (!b.allFinite()) {
      throw NumericalError("euler_maruyama: non-finite drift at step " + std::to_string(k));
    }
    x += b * dt;
    for (Index i = 0; i < x.size(); ++i) x(i) += noise_scale * noise(rng);
    if (!x.allFinite()) throw NumericalError("euler_maruyama: state diverged at step " + std::to_string(k));
    path.row(k + 1) = x.transpose();
  }
  return PointSet(std::move(path));
}

PairedDataset simulate_pairs(const SdeModel& model, const InitialSampler& initial, double lag, Index m,
                             double dt, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("simulate_pairs: m must be >= 2");
  if (!(lag > 0.0)) throw std::invalid_argument("simulate_pairs: lag must be positive");
  validate(initial);
  const bool exact = model.ou.has_value();
  if (!exact && !(dt > 0.0)) throw std::invalid_argument("simulate_pairs: dt must be positive");
  const Index steps = exact ? 0 : static_cast<Index>(std::ceil(lag / dt - 1e-12));
  const double step_dt = exact ? 0.0 : lag / static_cast<double>(std::max<Index>(steps, 1));

  const Index d = model.dim;
  Eigen::MatrixXd xs(m, d);
  Eigen::MatrixXd ys(m, d);
  bool failed = false;
  std::string failure;

#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd x0 = draw_state(initial, d, rng);
    Eigen::VectorXd y(d);
    try {
      if (exact) {
        for (Index k = 0; k < d; ++k) y(k) = ou_exact_step(x0(k), lag, model.ou->alpha, model.ou->beta_temp, rng);
      } else {
        const PointSet path = euler_maruyama(model, x0, step_dt, std::max<Index>(steps, 1), rng);
        y = path.row(path.size() - 1).transpose();
      }
    } catch (const std::exception& e) {
#pragma omp critical(pftube_simulate_failure)
      {
        failed = true;
        failure = "pair " + std::to_string(i) + ": " + e.what();
      }
      continue;
    }
    xs.row(i) = x0.transpose();
    ys.row(i) = y.transpose();
  }
  if (failed) throw NumericalError("simulate_pairs: " + failure);
  return PairedDataset(PointSet(std::move(xs)), PointSet(std::move(ys)), lag, seed, exact ? 0.0 : step_dt,
                       model.name);
}

}  // namespace pftube
