#include "pftube/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pftube/random.hpp"

namespace pftube {

namespace {

void check_args(Index m_b, double alpha) {
  if (m_b < 1) throw std::invalid_argument("bootstrap: m_b must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bootstrap: alpha must lie in (0, 1)");
}

}  // namespace

Index quantile_rank(Index m_b, double alpha) {
  check_args(m_b, alpha);
  const double x = static_cast<double>(m_b) * (1.0 - alpha);
  // absorb representation error, e.g. 200 * (1 - 0.05) must give 190
  const auto rank = static_cast<Index>(std::ceil(x - 1e-9 * std::max(1.0, x)));
  return std::clamp<Index>(rank, 1, m_b);
}

BootstrapSummary summarize_deviations(std::vector<double> deviations, double alpha, std::uint64_t seed) {
  const auto m_b = static_cast<Index>(deviations.size());
  const Index rank = quantile_rank(m_b, alpha);
  std::sort(deviations.begin(), deviations.end());
  BootstrapSummary summary;
  summary.quantile_delta = deviations[static_cast<std::size_t>(rank - 1)];
  summary.deviations = std::move(deviations);
  summary.confidence_alpha = alpha;
  summary.seed = seed;
  return summary;
}

std::vector<Index> resample_indices(Index m, std::uint64_t seed, Index replicate) {
  Rng rng = substream(seed, static_cast<std::uint64_t>(replicate));
  std::uniform_int_distribution<Index> pick(0, m - 1);
  std::vector<Index> idx(static_cast<std::size_t>(m));
  for (auto& i : idx) i = pick(rng);
  return idx;
}

BootstrapSummary bootstrap_deviation_quantile(const PairedDataset& data, double lambda, const KernelSpec& spec,
                                              Index m_b, double alpha, std::uint64_t seed) {
  check_args(m_b, alpha);
  const FittedOperator base = fit(data, lambda, spec);
  const ResampleDeviation deviation(base);
  std::vector<double> deviations(static_cast<std::size_t>(m_b), 0.0);
  bool failed = false;
  std::string failure;

#pragma omp parallel
  {
    ResampleDeviation::Workspace ws;
#pragma omp for schedule(dynamic)
    for (Index j = 0; j < m_b; ++j) {
      try {
        const auto idx = resample_indices(data.size(), seed, j);
        deviations[static_cast<std::size_t>(j)] = deviation(idx, ws);
      } catch (const std::exception& e) {
#pragma omp critical(pftube_bootstrap_failure)
        {
          failed = true;
          failure = "replicate " + std::to_string(j) + ": " + e.what();
        }
      }
    }
  }
  if (failed) throw NumericalError("bootstrap: " + failure);
  return summarize_deviations(std::move(deviations), alpha, seed);
}

BootstrapSummary bootstrap_deviation_quantile_reference(const PairedDataset& data, double lambda,
                                                        const KernelSpec& spec, Index m_b, double alpha,
                                                        std::uint64_t seed) {
  check_args(m_b, alpha);
  const FittedOperator base = fit(data, lambda, spec);
  std::vector<double> deviations;
  deviations.reserve(static_cast<std::size_t>(m_b));
  for (Index j = 0; j < m_b; ++j) {
    const auto idx = resample_indices(data.size(), seed, j);
    const FittedOperator resampled = fit(data.gather(idx), lambda, spec);
    deviations.push_back(operator_diff_norm(base, resampled));
  }
  return summarize_deviations(std::move(deviations), alpha, seed);
}

}  // namespace pftube
