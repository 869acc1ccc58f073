#include "pftube/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <omp.h>

namespace pftube {

namespace {

constexpr Index kBlockRows = 256;
constexpr Index kTileCols = 512;

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": state dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// Kernel values for rows [r0, r0 + out.rows()) against columns [c0, c0 + out.cols()).
// Every Gram path funnels through here.
void fill_block(const PointSet& rows, const PointSet& cols, const KernelSpec& spec, Index r0, Index c0,
                Eigen::Ref<Eigen::MatrixXd> out) {
  const Index nr = out.rows();
  const Index nc = out.cols();
  const auto& R = rows.matrix();
  const auto& C = cols.matrix();
  out.setZero();
  for (Index k = 0; k < R.cols(); ++k) {
    for (Index j = 0; j < nc; ++j) {
      const double c = C(c0 + j, k);
      for (Index i = 0; i < nr; ++i) {
        const double diff = R(r0 + i, k) - c;
        out(i, j) += diff * diff;
      }
    }
  }
  const double gamma = -0.5 / (spec.bandwidth * spec.bandwidth);
  out = (out.array() * gamma).exp() * spec.scale;
}

}  // namespace

KernelSpec KernelSpec::gaussian(double bandwidth, double scale) {
  KernelSpec spec{KernelFamily::gaussian_rbf, bandwidth, scale};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("kernel bandwidth must be positive and finite");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("kernel scale must be positive and finite");
  }
}

PointSet::PointSet(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw std::invalid_argument("point set must contain at least one point of dimension >= 1");
  }
  if (!points_.allFinite()) {
    throw std::invalid_argument("point set contains non-finite entries");
  }
}

PointSet PointSet::from_values(std::span<const double> values) {
  Eigen::MatrixXd m(static_cast<Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Index>(i), 0) = values[i];
  return PointSet(std::move(m));
}

PointSet PointSet::from_values(std::initializer_list<double> values) {
  return from_values(std::span<const double>(values.begin(), values.size()));
}

PointSet PointSet::concat(const PointSet& top, const PointSet& bottom) {
  require_same_dim(top.dim(), bottom.dim(), "PointSet::concat");
  Eigen::MatrixXd m(top.size() + bottom.size(), top.dim());
  m << top.matrix(), bottom.matrix();
  return PointSet(std::move(m));
}

PointSet PointSet::gather(std::span<const Index> indices) const {
  Eigen::MatrixXd m(static_cast<Index>(indices.size()), dim());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Index src = indices[i];
    if (src < 0 || src >= size()) throw std::out_of_range("PointSet::gather index out of range");
    m.row(static_cast<Index>(i)) = points_.row(src);
  }
  return PointSet(std::move(m));
}

Embedding::Embedding(PointSet anchors, Eigen::VectorXd weights)
    : anchors_(std::move(anchors)), weights_(std::move(weights)) {
  if (weights_.size() != anchors_.size()) {
    throw std::invalid_argument("embedding weights and anchors differ in length");
  }
  if (!weights_.allFinite()) throw std::invalid_argument("embedding weights must be finite");
}

Embedding Embedding::scaled(double factor) const { return Embedding(anchors_, weights_ * factor); }

Embedding Embedding::combine(double a, const Embedding& first, double b, const Embedding& second) {
  Eigen::VectorXd w(first.size() + second.size());
  w << a * first.weights(), b * second.weights();
  return Embedding(PointSet::concat(first.anchors(), second.anchors()), std::move(w));
}

double eval_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y, const KernelSpec& spec) {
  require_same_dim(x.size(), y.size(), "eval_kernel");
  const double sq = (x - y).squaredNorm();
  return spec.scale * std::exp(-sq / (2.0 * spec.bandwidth * spec.bandwidth));
}

Eigen::MatrixXd gram(const PointSet& rows, const PointSet& cols, const KernelSpec& spec) {
  require_same_dim(rows.dim(), cols.dim(), "gram");
  const Index n = rows.size();
  Eigen::MatrixXd K(n, cols.size());
  const Index blocks = (n + kBlockRows - 1) / kBlockRows;
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Index b = 0; b < blocks; ++b) {
    const Index r0 = b * kBlockRows;
    fill_block(rows, cols, spec, r0, 0, K.middleRows(r0, std::min(kBlockRows, n - r0)));
  }
  return K;
}

Eigen::MatrixXd gram_serial(const PointSet& rows, const PointSet& cols, const KernelSpec& spec) {
  require_same_dim(rows.dim(), cols.dim(), "gram");
  const Index n = rows.size();
  Eigen::MatrixXd K(n, cols.size());
  for (Index r0 = 0; r0 < n; r0 += kBlockRows) {
    fill_block(rows, cols, spec, r0, 0, K.middleRows(r0, std::min(kBlockRows, n - r0)));
  }
  return K;
}

void gram_tile(const PointSet& rows, Index r0, const PointSet& cols, Index c0, const KernelSpec& spec,
               Eigen::Ref<Eigen::MatrixXd> out) {
  require_same_dim(rows.dim(), cols.dim(), "gram_tile");
  if (r0 < 0 || c0 < 0 || r0 + out.rows() > rows.size() || c0 + out.cols() > cols.size()) {
    throw std::out_of_range("gram_tile: tile exceeds the point sets");
  }
  fill_block(rows, cols, spec, r0, c0, out);
}

Embedding embed_sample(const PointSet& samples) {
  const Index n = samples.size();
  return Embedding(samples, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

double rkhs_inner(const Embedding& a, const Embedding& b, const KernelSpec& spec) {
  require_same_dim(a.dim(), b.dim(), "rkhs_inner");
  // Identical embeddings only need the diagonal blocks and the upper triangle; this
  // also makes mmd(a, a') exactly 0 when a' is an equal copy.
  const bool same = a.size() == b.size() && a.weights() == b.weights() &&
                    a.anchors().matrix() == b.anchors().matrix();
  const Index n = a.size();
  const Index nc = b.size();
  const Index blocks = (n + kBlockRows - 1) / kBlockRows;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(dynamic) if (blocks > 1)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index r0 = blk * kBlockRows;
    const Index nr = std::min(kBlockRows, n - r0);
    const auto wa = a.weights().segment(r0, nr);
    Eigen::MatrixXd tile;
    double sum = 0.0;
    Index c0 = 0;
    if (same) {
      tile.resize(nr, nr);
      fill_block(a.anchors(), b.anchors(), spec, r0, r0, tile);
      sum = wa.dot(tile * wa);
      c0 = r0 + nr;
    }
    for (; c0 < nc; c0 += kTileCols) {
      const Index cols = std::min(kTileCols, nc - c0);
      tile.resize(nr, cols);
      fill_block(a.anchors(), b.anchors(), spec, r0, c0, tile);
      const double v = wa.dot(tile * b.weights().segment(c0, cols));
      sum += same ? 2.0 * v : v;
    }
    partial[static_cast<std::size_t>(blk)] = sum;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double rkhs_norm(const Embedding& e, const KernelSpec& spec) {
  return std::sqrt(std::max(0.0, rkhs_inner(e, e, spec)));
}

double mmd(const Embedding& a, const Embedding& b, const KernelSpec& spec) {
  const double sq = rkhs_inner(a, a, spec) + rkhs_inner(b, b, spec) - 2.0 * rkhs_inner(a, b, spec);
  return std::sqrt(std::max(0.0, sq));
}

double median_heuristic_bandwidth(const PointSet& points) {
  const Index n = points.size();
  if (n < 2) return 1.0;
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  const auto& P = points.matrix();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) dist.push_back((P.row(i) - P.row(j)).norm());
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return median > 0.0 ? median : 1.0;
}

}  // namespace pftube
