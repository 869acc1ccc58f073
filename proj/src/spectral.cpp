#include "pftube/spectral.hpp"

#include <stdexcept>

#include "pftube/kernels.hpp"

namespace pftube {

Eigen::MatrixXd SpanBasis::coordinates_to_weights() const {
  return eigenvectors * eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
}

Eigen::MatrixXd SpanBasis::gram_times_weights() const { return eigenvectors * eigenvalues.cwiseSqrt().asDiagonal(); }

Eigen::MatrixXd SpanBasis::gram_sqrt() const {
  return eigenvectors * eigenvalues.cwiseSqrt().asDiagonal() * eigenvectors.transpose();
}

SpanBasis span_basis(const Eigen::MatrixXd& gram, double relative_cutoff) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) throw std::invalid_argument("span_basis: Gram must be square");
  if (!gram.allFinite()) throw NumericalError("span_basis: Gram has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericalError("span_basis: eigendecomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  const Eigen::Index n = values.size();
  const double top = values(n - 1);
  SpanBasis basis;
  if (!(top > 0.0)) {
    basis.eigenvectors.resize(n, 0);
    basis.eigenvalues.resize(0);
    return basis;
  }
  const double threshold = relative_cutoff * top;
  Eigen::Index r = 0;
  while (r < n && values(n - 1 - r) > threshold) ++r;
  basis.eigenvectors = eig.eigenvectors().rightCols(r).rowwise().reverse();
  basis.eigenvalues = values.tail(r).reverse();
  return basis;
}

TopEigen top_symmetric_eigen(const Eigen::MatrixXd& m) {
  TopEigen out;
  if (m.rows() == 0) return out;
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("top_symmetric_eigen: eigendecomposition failed");
  const Eigen::Index last = sym.rows() - 1;
  out.value = eig.eigenvalues()(last);
  out.vector = eig.eigenvectors().col(last);
  return out;
}

}  // namespace pftube
