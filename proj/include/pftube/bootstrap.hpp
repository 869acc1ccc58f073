#pragma once

#include <cstdint>
#include <vector>

#include "pftube/kernels.hpp"
#include "pftube/operator.hpp"
#include "pftube/sde.hpp"

namespace pftube {

struct BootstrapSummary {
  std::vector<double> deviations;  // sorted ascending
  double quantile_delta = 0.0;
  double confidence_alpha = 0.05;
  std::uint64_t seed = 0;
};

/// 1-based rank ceil(m_b (1 - alpha)), clamped to [1, m_b].
Index quantile_rank(Index m_b, double alpha);

/// Sorts `deviations` and picks the (1 - alpha) quantile.
BootstrapSummary summarize_deviations(std::vector<double> deviations, double alpha, std::uint64_t seed);

/// Pair indices of replicate `replicate`: m draws with replacement from its own substream.
std::vector<Index> resample_indices(Index m, std::uint64_t seed, Index replicate);

/// Bootstrap quantile of ||P_hat - P~||. Replicates run in parallel (OpenMP),
/// each on an independent substream; the result is identical for any thread count.
BootstrapSummary bootstrap_deviation_quantile(const PairedDataset& data, double lambda, const KernelSpec& spec,
                                              Index m_b, double alpha, std::uint64_t seed);

/// Serial reference: refits every resample and evaluates the concatenated-anchor
/// difference norm directly. Same resamples as the parallel version.
BootstrapSummary bootstrap_deviation_quantile_reference(const PairedDataset& data, double lambda,
                                                        const KernelSpec& spec, Index m_b, double alpha,
                                                        std::uint64_t seed);

}  // namespace pftube
