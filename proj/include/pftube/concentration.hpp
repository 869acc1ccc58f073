#pragma once

#include "pftube/kernels.hpp"
#include "pftube/sde.hpp"

namespace pftube {

/// V-statistic moment estimates of the rank-one cross-covariance c_xy.
struct MomentEstimates {
  double m2_t = 0.0;           // E ||c_xy||_HS^2
  double hs_norm_cxy = 0.0;    // ||C_YX||_HS
  double sigma_t = 0.0;        // sqrt(max(0, m2_t - hs_norm_cxy^2))
  double sigma_t_sq_raw = 0.0; // m2_t - hs_norm_cxy^2 before clamping
  double lag = 0.0;
};

/// (1/m) sum_i k(x_i, x_i) k(y_i, y_i).
double estimate_second_moment(const PairedDataset& data, const KernelSpec& spec);

/// sqrt((1/m^2) sum_{i,j} k(x_i, x_j) k(y_i, y_j)), including i = j terms.
double estimate_hs_norm_cxy(const PairedDataset& data, const KernelSpec& spec);

MomentEstimates estimate_moments(const PairedDataset& data, const KernelSpec& spec);

/// ||Phi_1||_1^2 + exp(-2 R t / beta) ||P_0 Phi_1||_2^2
double poincare_envelope_m2(double t, double rate, double beta_temp, double phi1_l1, double phi1_centered_l2);

/// ||k||_1^2 + exp(-2 R t / beta) ||P_{0,2} k||_2^2
double poincare_envelope_hs(double t, double rate, double beta_temp, double kernel_l1, double kernel_centered_l2);

/// Bernstein bound on ||P_hat - P|| holding with probability >= 1 - 2 delta:
///   2/(lambda sqrt(m)) log(2/delta) [sigma_t + (hs/lambda) sigma_0 + (1 + hs/lambda) L / sqrt(m)]
double bernstein_bound(double lambda, Index m, double delta_conf, double sigma_t, double sigma_0,
                       double hs_norm_cyx, double moment_constant);

/// Moment constant for bounded kernels: sup k(x, x)^2 (1 for the unit-scale RBF).
double default_moment_constant(const KernelSpec& spec);

}  // namespace pftube
