#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pftube/kernels.hpp"
#include "pftube/random.hpp"

namespace pftube {

struct OuParams {
  double alpha = 1.0;
  double beta_temp = 1.0;
};

/// dX = drift(X) dt + diffusion_const dW.
/// `ou` is set for Ornstein-Uhlenbeck models so that exact transitions can be used.
struct SdeModel {
  std::string name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
  double diffusion_const = 0.0;
  Index dim = 1;
  std::optional<OuParams> ou;
  /// Polynomial coefficients (ascending powers) of the separable potential, if Langevin.
  std::vector<double> potential;
  double beta_temp = 1.0;

  /// dX = -alpha X dt + sqrt(2 / beta_temp) dW, applied to each coordinate.
  static SdeModel ornstein_uhlenbeck(double alpha, double beta_temp, Index dim = 1);

  /// Overdamped Langevin dX = -grad V(X) dt + sqrt(2 / beta_temp) dW with
  /// V(x) = sum_d p(x_d), p given by ascending coefficients.
  static SdeModel langevin(std::vector<double> potential_coeffs, double beta_temp, Index dim = 1);

  /// V(x) = (x^2 - 1)^2 per coordinate.
  static SdeModel double_well(double beta_temp, Index dim = 1);
};

struct GaussianInit {
  double mean = 0.0;
  double variance = 1.0;
};
struct UniformInit {
  double lower = 0.0;
  double upper = 1.0;
};
struct PointInit {
  double value = 0.0;
};

/// Initial-state distribution; every coordinate is drawn independently.
using InitialSampler = std::variant<GaussianInit, UniformInit, PointInit>;

void validate(const InitialSampler& sampler);
double draw(const InitialSampler& sampler, Rng& rng);

struct PairedDataset {
  PointSet x;
  PointSet y;
  double lag = 1.0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::string model_name;

  PairedDataset(PointSet x, PointSet y, double lag, std::uint64_t seed = 0, double dt = 0.0,
                std::string model_name = {});

  Index size() const { return x.size(); }
  Index dim() const { return x.dim(); }

  /// Pairs selected jointly by index (duplicates allowed).
  PairedDataset gather(std::span<const Index> indices) const;
};

/// One draw from the exact OU transition N(x0 e^{-alpha lag}, (1 - e^{-2 alpha lag}) / (alpha beta_temp)).
double ou_exact_step(double x0, double lag, double alpha, double beta_temp, Rng& rng);

/// Euler-Maruyama path of `steps` increments; row 0 is x0.
PointSet euler_maruyama(const SdeModel& model, const Eigen::VectorXd& x0, double dt, Index steps, Rng& rng);

/// m independent pairs (x_i, y_i). Pair i uses its own substream of `seed`, so the
/// result is identical for any thread count. OU models use the exact transition;
/// other models integrate ceil(lag / dt) Euler-Maruyama steps of size lag / steps.
PairedDataset simulate_pairs(const SdeModel& model, const InitialSampler& initial, double lag, Index m,
                             double dt, std::uint64_t seed);

}  // namespace pftube
