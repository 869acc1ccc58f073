#include "pftube/tube.hpp"

#include <cmath>
#include <stdexcept>

namespace pftube {

namespace {

void check_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

void check_norms(std::span<const double> norms, Index horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (static_cast<Index>(norms.size()) < horizon) {
    throw std::invalid_argument("norm sequence shorter than the horizon");
  }
}

}  // namespace

std::vector<double> AmbiguityTube::radii() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.radius);
  return out;
}

std::vector<double> AmbiguityTube::embedding_norms() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.embedding_norm);
  return out;
}

AmbiguityTube propagate_tube(const FittedOperator& op, const Embedding& initial, double rho0, Index horizon,
                             const OperatorNorms& norms) {
  check_nonnegative(rho0, "rho0");
  check_nonnegative(norms.e_norm, "E");
  check_nonnegative(norms.f_norm, "F");
  if (horizon < 1) throw std::invalid_argument("propagate_tube: horizon must be >= 1");

  AmbiguityTube tube;
  tube.norms = norms;
  tube.steps.reserve(static_cast<std::size_t>(horizon + 1));
  tube.steps.push_back({initial, rho0, rkhs_norm(initial, op.spec())});
  for (Index i = 0; i < horizon; ++i) {
    const TubeStep& current = tube.steps.back();
    Embedding next = pushforward(op, current.embedding);
    const double radius = norms.f_norm * (current.embedding_norm + current.radius) + norms.e_norm * current.radius;
    const double norm = rkhs_norm(next, op.spec());
    tube.steps.push_back({std::move(next), radius, norm});
  }
  return tube;
}

std::vector<double> radius_recursion(double e_norm, double f_norm, double rho0, std::span<const double> norms) {
  check_nonnegative(rho0, "rho0");
  std::vector<double> rho{rho0};
  rho.reserve(norms.size() + 1);
  for (double n : norms) rho.push_back(f_norm * (n + rho.back()) + e_norm * rho.back());
  return rho;
}

double closed_form_bound_computable(double e_norm, double f_norm, double rho0,
                                    std::span<const double> empirical_norms, Index horizon) {
  check_norms(empirical_norms, horizon);
  const double growth = e_norm + f_norm;
  double power = 1.0;     // (E+F)^i
  double carried = rho0;  // (E+F)^T rho0, multiplied in the same order as the recursion
  double sum = 0.0;
  for (Index i = 0; i < horizon; ++i) {
    sum += power * f_norm * empirical_norms[static_cast<std::size_t>(horizon - 1 - i)];
    power *= growth;
    carried *= growth;
  }
  return carried + sum;
}

double closed_form_bound_oracle(double e_norm, double f_norm, double mmd0, std::span<const double> true_norms,
                                Index horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (static_cast<Index>(true_norms.size()) < horizon - 1) {
    throw std::invalid_argument("true norm sequence shorter than the horizon requires");
  }
  double power = e_norm;  // E^i, starting at i = 1
  double sum = 0.0;
  for (Index i = 1; i <= horizon - 1; ++i) {
    sum += power * f_norm * true_norms[static_cast<std::size_t>(horizon - i - 1)];
    power *= e_norm;
  }
  return std::pow(e_norm, static_cast<double>(horizon)) * mmd0 + sum;
}

}  // namespace pftube
