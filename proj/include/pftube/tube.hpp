#pragma once

#include <span>
#include <vector>

#include "pftube/kernels.hpp"
#include "pftube/operator.hpp"

namespace pftube {

struct TubeStep {
  Embedding embedding;
  double radius = 0.0;
  double embedding_norm = 0.0;
};

/// Time-indexed ambiguity sets {mu : ||mu - center_t|| <= radius_t}, t = 0..T.
struct AmbiguityTube {
  std::vector<TubeStep> steps;
  OperatorNorms norms;

  Index horizon() const { return static_cast<Index>(steps.size()) - 1; }
  std::vector<double> radii() const;
  std::vector<double> embedding_norms() const;
};

/// Forward propagation of the center embedding and the MMD radius:
///   center_{i+1} = P_hat center_i
///   rho_{i+1}    = F (||center_i|| + rho_i) + E rho_i
/// E and F are supplied once up front.
AmbiguityTube propagate_tube(const FittedOperator& op, const Embedding& initial, double rho0, Index horizon,
                             const OperatorNorms& norms);

/// The radius recursion alone, driven by a given norm sequence ||center_t||, t = 0..T-1.
/// Returns rho_0..rho_T.
std::vector<double> radius_recursion(double e_norm, double f_norm, double rho0, std::span<const double> norms);

/// Unrolled recursion:
///   (E+F)^T rho0 + sum_{i=0}^{T-1} (E+F)^i F ||center_{T-1-i}||.
double closed_form_bound_computable(double e_norm, double f_norm, double rho0,
                                    std::span<const double> empirical_norms, Index horizon);

/// Bound in terms of the true embedded norms (synthetic ground truth only):
///   E^T mmd0 + sum_{i=1}^{T-1} E^i F ||E p_{T-i-1}||.
double closed_form_bound_oracle(double e_norm, double f_norm, double mmd0, std::span<const double> true_norms,
                                Index horizon);

}  // namespace pftube
