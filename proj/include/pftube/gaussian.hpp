#pragma once

#include "pftube/kernels.hpp"

namespace pftube {

/// Closed-form embeddings of 1-D Gaussians under the gaussian-rbf kernel.
/// With kernel bandwidth s and N(mean, v):
///   mu(q) = scale * s / sqrt(s^2 + v) * exp(-(q - mean)^2 / (2 (s^2 + v)))
struct GaussianLaw {
  double mean = 0.0;
  double variance = 0.0;
};

double gaussian_rbf_analytic_embedding(const GaussianLaw& law, const KernelSpec& spec, double query);

/// <mu_P, mu_Q> for two 1-D Gaussians.
double gaussian_rbf_analytic_inner(const GaussianLaw& p, const GaussianLaw& q, const KernelSpec& spec);

/// MMD between a (1-D) weighted embedding and the closed-form embedding of `law`.
double mmd_to_gaussian(const Embedding& e, const GaussianLaw& law, const KernelSpec& spec);

/// Exact OU image of N(mean, v) after `lag`: N(mean e^{-a t}, v e^{-2 a t} + (1 - e^{-2 a t}) / (a beta)).
GaussianLaw ou_propagate(const GaussianLaw& law, double lag, double alpha, double beta_temp);

}  // namespace pftube
