#include "pftube/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace pftube {

namespace {

void check(const GaussianLaw& law) {
  if (!(law.variance >= 0.0)) throw std::invalid_argument("gaussian law: variance must be >= 0");
}

}  // namespace

double gaussian_rbf_analytic_embedding(const GaussianLaw& law, const KernelSpec& spec, double query) {
  check(law);
  const double s2 = spec.bandwidth * spec.bandwidth;
  const double total = s2 + law.variance;
  const double d = query - law.mean;
  return spec.scale * std::sqrt(s2 / total) * std::exp(-d * d / (2.0 * total));
}

double gaussian_rbf_analytic_inner(const GaussianLaw& p, const GaussianLaw& q, const KernelSpec& spec) {
  check(p);
  check(q);
  return gaussian_rbf_analytic_embedding({p.mean, p.variance + q.variance}, spec, q.mean);
}

double mmd_to_gaussian(const Embedding& e, const GaussianLaw& law, const KernelSpec& spec) {
  if (e.dim() != 1) throw std::invalid_argument("mmd_to_gaussian: embedding must be one-dimensional");
  double cross = 0.0;
  for (Index i = 0; i < e.size(); ++i) {
    cross += e.weights()(i) * gaussian_rbf_analytic_embedding(law, spec, e.anchors().matrix()(i, 0));
  }
  const double sq = rkhs_inner(e, e, spec) - 2.0 * cross + gaussian_rbf_analytic_inner(law, law, spec);
  return std::sqrt(std::max(0.0, sq));
}

GaussianLaw ou_propagate(const GaussianLaw& law, double lag, double alpha, double beta_temp) {
  check(law);
  const double decay = std::exp(-alpha * lag);
  const double noise = -std::expm1(-2.0 * alpha * lag) / (alpha * beta_temp);
  return {law.mean * decay, law.variance * decay * decay + noise};
}

}  // namespace pftube
