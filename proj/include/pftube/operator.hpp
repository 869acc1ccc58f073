#pragma once

#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "pftube/kernels.hpp"
#include "pftube/sde.hpp"
#include "pftube/spectral.hpp"

namespace pftube {

/// Regularized empirical embedded Perron-Frobenius operator with matrix
/// representation K_YX (K_XX + m lambda I)^{-1}.
///
/// Immutable after `fit`; every member function is const and safe to call
/// from several threads at once.
class FittedOperator {
 public:
  const PointSet& x_train() const { return x_; }
  const PointSet& y_train() const { return y_; }
  double lambda() const { return lambda_; }
  const KernelSpec& spec() const { return spec_; }
  Index size() const { return x_.size(); }

  const Eigen::MatrixXd& gram_xx() const { return kxx_; }
  const Eigen::MatrixXd& gram_yy() const { return kyy_; }

  /// (K_XX + m lambda I)^{-1} rhs via the stored Cholesky factor.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  friend FittedOperator fit(const PairedDataset& data, double lambda, const KernelSpec& spec);

 private:
  FittedOperator(PointSet x, PointSet y, double lambda, KernelSpec spec);

  PointSet x_;
  PointSet y_;
  double lambda_;
  KernelSpec spec_;
  Eigen::MatrixXd kxx_;
  Eigen::MatrixXd kyy_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// E = ||P_hat||, F = estimate of ||P_hat - P||.
struct OperatorNorms {
  double e_norm = 0.0;
  double f_norm = 0.0;
};

FittedOperator fit(const PairedDataset& data, double lambda, const KernelSpec& spec);

/// Next-step embedding: anchors y_train, weights (K_XX + m lambda I)^{-1} K_{X,Z} w.
Embedding pushforward(const FittedOperator& op, const Embedding& mu);

struct NormWithDirection {
  double norm = 0.0;
  /// Maximizing embedding with unit RKHS norm.
  Embedding direction;
};

/// sqrt(lambda_max(K^{1/2} G K_YY G K^{1/2})), G = (K_XX + m lambda I)^{-1}, where the
/// square root is taken on the numerical range of K_XX.
double operator_norm(const FittedOperator& op);
NormWithDirection operator_norm_with_direction(const FittedOperator& op);

/// ||op1 - op2|| over the span of both training input sets, via the thresholded
/// pseudo-inverse of K_ZZ with Z = [x1; x2].
double operator_diff_norm(const FittedOperator& op1, const FittedOperator& op2);
NormWithDirection operator_diff_norm_with_direction(const FittedOperator& op1, const FittedOperator& op2);

/// Deviation ||P_base - P_resample|| for resamples of the base training pairs.
///
/// Resampled anchors are a subset of the base anchors, so the span of
/// [x; x_resampled] equals the span of x and one eigendecomposition of the base
/// Gram matrix serves every replicate. Resampled Gram blocks are gathered
/// from the base Gram matrices instead of being re-evaluated.
class ResampleDeviation {
 public:
  explicit ResampleDeviation(const FittedOperator& base);

  /// Scratch matrices reused across calls; one per thread.
  struct Workspace {
    Eigen::MatrixXd factor;
    Eigen::MatrixXd b;
    Eigen::MatrixXd kyy;
    Eigen::MatrixXd kyy_b;
  };

  /// Thread-safe; `indices` selects the resampled pairs (length m, duplicates allowed).
  double operator()(std::span<const Index> indices) const;
  double operator()(std::span<const Index> indices, Workspace& ws) const;

  Index basis_rank() const { return kw_.cols(); }

 private:
  const FittedOperator* base_;
  Eigen::MatrixXd kw_;   // K_XX W
  Eigen::MatrixXd a_;    // base pushforward weights per basis direction
  Eigen::MatrixXd ka_;   // K_YY a
  Eigen::MatrixXd aka_;  // a^T K_YY a
};

}  // namespace pftube
