#include "pftube/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pftube {

double estimate_second_moment(const PairedDataset& data, const KernelSpec& spec) {
  const Index m = data.size();
  double sum = 0.0;
  for (Index i = 0; i < m; ++i) {
    sum += eval_kernel(data.x.row(i), data.x.row(i), spec) * eval_kernel(data.y.row(i), data.y.row(i), spec);
  }
  return sum / static_cast<double>(m);
}

double estimate_hs_norm_cxy(const PairedDataset& data, const KernelSpec& spec) {
  // Cache-sized tiles; per-block sums are added in block order.
  constexpr Index kRows = 256;
  constexpr Index kCols = 512;
  const Index m = data.size();
  const Index blocks = (m + kRows - 1) / kRows;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel if (blocks > 1)
  {
    Eigen::MatrixXd kx, ky;
#pragma omp for schedule(dynamic)
    for (Index b = 0; b < blocks; ++b) {
      const Index r0 = b * kRows;
      const Index nr = std::min(kRows, m - r0);
      double sum = 0.0;
      for (Index c0 = 0; c0 < m; c0 += kCols) {
        const Index nc = std::min(kCols, m - c0);
        kx.resize(nr, nc);
        ky.resize(nr, nc);
        gram_tile(data.x, r0, data.x, c0, spec, kx);
        gram_tile(data.y, r0, data.y, c0, spec, ky);
        sum += kx.cwiseProduct(ky).sum();
      }
      partial[static_cast<std::size_t>(b)] = sum;
    }
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return std::sqrt(std::max(0.0, total) / (static_cast<double>(m) * static_cast<double>(m)));
}

MomentEstimates estimate_moments(const PairedDataset& data, const KernelSpec& spec) {
  MomentEstimates est;
  est.m2_t = estimate_second_moment(data, spec);
  est.hs_norm_cxy = estimate_hs_norm_cxy(data, spec);
  est.sigma_t_sq_raw = est.m2_t - est.hs_norm_cxy * est.hs_norm_cxy;
  est.sigma_t = std::sqrt(std::max(0.0, est.sigma_t_sq_raw));
  est.lag = data.lag;
  return est;
}

double poincare_envelope_m2(double t, double rate, double beta_temp, double phi1_l1, double phi1_centered_l2) {
  if (!(rate > 0.0) || !(beta_temp > 0.0) || t < 0.0) {
    throw std::invalid_argument("poincare envelope needs t >= 0, R > 0, beta_temp > 0");
  }
  return phi1_l1 * phi1_l1 + std::exp(-2.0 * rate * t / beta_temp) * phi1_centered_l2 * phi1_centered_l2;
}

double poincare_envelope_hs(double t, double rate, double beta_temp, double kernel_l1, double kernel_centered_l2) {
  return poincare_envelope_m2(t, rate, beta_temp, kernel_l1, kernel_centered_l2);
}

double bernstein_bound(double lambda, Index m, double delta_conf, double sigma_t, double sigma_0, double hs_norm_cyx,
                       double moment_constant) {
  if (!(delta_conf > 0.0 && delta_conf < 1.0)) throw std::invalid_argument("bernstein_bound: delta must lie in (0, 1)");
  if (!(lambda > 0.0)) throw std::invalid_argument("bernstein_bound: lambda must be positive");
  if (m < 1) throw std::invalid_argument("bernstein_bound: m must be >= 1");
  if (sigma_t < 0.0 || sigma_0 < 0.0 || hs_norm_cyx < 0.0 || moment_constant < 0.0) {
    throw std::invalid_argument("bernstein_bound: moment inputs must be >= 0");
  }
  const double root_m = std::sqrt(static_cast<double>(m));
  const double ratio = hs_norm_cyx / lambda;
  const double bracket = sigma_t + ratio * sigma_0 + (1.0 + ratio) * moment_constant / root_m;
  return 2.0 / (lambda * root_m) * std::log(2.0 / delta_conf) * bracket;
}

double default_moment_constant(const KernelSpec& spec) { return spec.scale * spec.scale; }

}  // namespace pftube
