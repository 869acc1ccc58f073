#include "pftube/operator.hpp"

#include <cmath>
#include <stdexcept>

namespace pftube {

namespace {

void gather_rows(const Eigen::MatrixXd& m, std::span<const Index> rows, Eigen::MatrixXd& out) {
  out.resize(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
}

void gather_square(const Eigen::MatrixXd& m, std::span<const Index> idx, Eigen::MatrixXd& out) {
  const auto n = static_cast<Index>(idx.size());
  out.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) out(i, j) = m(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
}

double sqrt_clamped(double v) { return std::sqrt(std::max(0.0, v)); }

}  // namespace

FittedOperator::FittedOperator(PointSet x, PointSet y, double lambda, KernelSpec spec)
    : x_(std::move(x)), y_(std::move(y)), lambda_(lambda), spec_(spec) {}

Eigen::MatrixXd FittedOperator::solve(const Eigen::MatrixXd& rhs) const { return factor_.solve(rhs); }

FittedOperator fit(const PairedDataset& data, double lambda, const KernelSpec& spec) {
  if (data.size() < 2) throw std::invalid_argument("fit: need at least 2 pairs");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("fit: lambda must be positive");
  spec.validate();
  FittedOperator op(data.x, data.y, lambda, spec);
  op.kxx_ = gram(op.x_, op.x_, spec);
  op.kyy_ = gram(op.y_, op.y_, spec);
  if (!op.kxx_.allFinite() || !op.kyy_.allFinite()) throw NumericalError("fit: non-finite kernel entries");
  Eigen::MatrixXd regularized = op.kxx_;
  regularized.diagonal().array() += static_cast<double>(data.size()) * lambda;
  op.factor_.compute(regularized);
  if (op.factor_.info() != Eigen::Success) throw NumericalError("fit: Cholesky factorization failed");
  return op;
}

Embedding pushforward(const FittedOperator& op, const Embedding& mu) {
  if (mu.dim() != op.x_train().dim()) throw std::invalid_argument("pushforward: state dimension mismatch");
  const Eigen::VectorXd rhs = gram(op.x_train(), mu.anchors(), op.spec()) * mu.weights();
  return Embedding(op.y_train(), op.solve(rhs));
}

NormWithDirection operator_norm_with_direction(const FittedOperator& op) {
  const SpanBasis basis = span_basis(op.gram_xx());
  if (basis.rank() == 0) {
    return {0.0, Embedding(op.x_train(), Eigen::VectorXd::Zero(op.size()))};
  }
  // Columns of G K W are pushforward weights of the orthonormal directions.
  const Eigen::MatrixXd pushed = op.solve(basis.gram_times_weights());
  const Eigen::MatrixXd h = pushed.transpose() * (op.gram_yy() * pushed);
  const TopEigen top = top_symmetric_eigen(h);
  return {sqrt_clamped(top.value),
          Embedding(op.x_train(), basis.coordinates_to_weights() * top.vector)};
}

double operator_norm(const FittedOperator& op) { return operator_norm_with_direction(op).norm; }

NormWithDirection operator_diff_norm_with_direction(const FittedOperator& op1, const FittedOperator& op2) {
  if (op1.spec().family != op2.spec().family || op1.spec().bandwidth != op2.spec().bandwidth ||
      op1.spec().scale != op2.spec().scale) {
    throw std::invalid_argument("operator_diff_norm: kernel specs differ");
  }
  if (op1.x_train().dim() != op2.x_train().dim()) {
    throw std::invalid_argument("operator_diff_norm: state dimension mismatch");
  }
  const PointSet z = PointSet::concat(op1.x_train(), op2.x_train());
  const Eigen::MatrixXd kzz = gram(z, z, op1.spec());
  const SpanBasis basis = span_basis(kzz);
  if (basis.rank() == 0) return {0.0, Embedding(z, Eigen::VectorXd::Zero(z.size()))};
  const Eigen::MatrixXd w = basis.coordinates_to_weights();
  const Index m1 = op1.size();
  const Index m2 = op2.size();

  // a, b: pushforward weights (on y1, y2) of each orthonormal direction on Z.
  const Eigen::MatrixXd a = op1.solve(kzz.topRows(m1) * w);
  const Eigen::MatrixXd b = op2.solve(kzz.bottomRows(m2) * w);
  const Eigen::MatrixXd k12 = gram(op1.y_train(), op2.y_train(), op1.spec());

  const Eigen::MatrixXd aa = a.transpose() * (op1.gram_yy() * a);
  const Eigen::MatrixXd bb = b.transpose() * (op2.gram_yy() * b);
  const Eigen::MatrixXd ab = a.transpose() * (k12 * b);
  const Eigen::MatrixXd h = (aa - ab) + (bb - ab.transpose());
  const TopEigen top = top_symmetric_eigen(h);
  return {sqrt_clamped(top.value), Embedding(z, w * top.vector)};
}

double operator_diff_norm(const FittedOperator& op1, const FittedOperator& op2) {
  return operator_diff_norm_with_direction(op1, op2).norm;
}

ResampleDeviation::ResampleDeviation(const FittedOperator& base) : base_(&base) {
  const SpanBasis basis = span_basis(base.gram_xx());
  const Eigen::MatrixXd w = basis.coordinates_to_weights();
  kw_ = base.gram_xx() * w;
  a_ = base.solve(kw_);
  ka_ = base.gram_yy() * a_;
  aka_ = a_.transpose() * ka_;
  aka_ = 0.5 * (aka_ + aka_.transpose()).eval();
}

double ResampleDeviation::operator()(std::span<const Index> indices) const {
  Workspace ws;
  return (*this)(indices, ws);
}

double ResampleDeviation::operator()(std::span<const Index> indices, Workspace& ws) const {
  const Index m = base_->size();
  if (static_cast<Index>(indices.size()) != m) {
    throw std::invalid_argument("ResampleDeviation: resample must have the base size");
  }
  if (kw_.cols() == 0) return 0.0;
  gather_square(base_->gram_xx(), indices, ws.factor);
  ws.factor.diagonal().array() += static_cast<double>(m) * base_->lambda();
  const Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> factor(ws.factor);
  if (factor.info() != Eigen::Success) throw NumericalError("ResampleDeviation: Cholesky factorization failed");

  gather_rows(kw_, indices, ws.b);
  factor.solveInPlace(ws.b);
  const auto& b = ws.b;
  gather_square(base_->gram_yy(), indices, ws.kyy);
  ws.kyy_b.noalias() = ws.kyy * b;
  Eigen::MatrixXd bb = b.transpose() * ws.kyy_b;
  bb = 0.5 * (bb + bb.transpose()).eval();
  // a^T K_{Y, Y~} b, with K_{Y, Y~} = K_YY(:, idx)
  Eigen::MatrixXd ka_rows;
  gather_rows(ka_, indices, ka_rows);
  const Eigen::MatrixXd ab = ka_rows.transpose() * b;
  const Eigen::MatrixXd h = (aka_ - ab) + (bb - ab.transpose());
  return sqrt_clamped(top_symmetric_eigen(h).value);
}

}  // namespace pftube
