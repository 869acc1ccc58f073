#pragma once

#include <Eigen/Dense>

namespace pftube {

/// Default relative cutoff for discarding Gram eigenvalues.
inline constexpr double kGramRelativeCutoff = 1e-10;

/// Orthonormal basis of span{k(z_i, .)} from a thresholded eigendecomposition
/// K = U D U^T of a symmetric PSD Gram matrix. Eigenvalues below
/// cutoff * lambda_max are discarded.
///
/// With W = U_r D_r^{-1/2}, the functions Phi_Z W are orthonormal in the RKHS:
///   an embedding with weights alpha on Z has coordinates D^{1/2} U^T alpha, and
///   coordinates c correspond to weights W c.
struct SpanBasis {
  Eigen::MatrixXd eigenvectors;  // U_r, n x r
  Eigen::VectorXd eigenvalues;   // D_r, descending

  Eigen::Index rank() const { return eigenvalues.size(); }
  /// W = U_r D_r^{-1/2}: coordinates -> anchor weights.
  Eigen::MatrixXd coordinates_to_weights() const;
  /// K W = U_r D_r^{1/2}, exact on the retained space.
  Eigen::MatrixXd gram_times_weights() const;
  /// U_r D_r^{1/2} U_r^T, the square root of K on its numerical range.
  Eigen::MatrixXd gram_sqrt() const;
};

SpanBasis span_basis(const Eigen::MatrixXd& gram, double relative_cutoff = kGramRelativeCutoff);

/// Largest eigenvalue and eigenvector of a symmetric matrix after (M + M^T)/2.
struct TopEigen {
  double value = 0.0;
  Eigen::VectorXd vector;
};
TopEigen top_symmetric_eigen(const Eigen::MatrixXd& m);

}  // namespace pftube
