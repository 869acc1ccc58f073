#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pftube {

using Index = Eigen::Index;

/// Raised when a numerical routine cannot produce a finite answer
/// (failed factorization, non-finite drift, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KernelFamily { gaussian_rbf };

/// Positive-definite kernel. For gaussian-rbf:
///   k(x, y) = scale * exp(-|x - y|^2 / (2 bandwidth^2)).
/// `scale` defaults to 1 so that k(x, x) = 1.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian_rbf;
  double bandwidth = 1.0;
  double scale = 1.0;

  static KernelSpec gaussian(double bandwidth, double scale = 1.0);
  void validate() const;
};

/// n states of dimension d, stored one state per row.
class PointSet {
 public:
  explicit PointSet(Eigen::MatrixXd points);

  /// 1-D convenience constructor: one state per value.
  static PointSet from_values(std::span<const double> values);
  static PointSet from_values(std::initializer_list<double> values);
  static PointSet concat(const PointSet& top, const PointSet& bottom);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Eigen::MatrixXd& matrix() const { return points_; }
  auto row(Index i) const { return points_.row(i); }

  /// Rows selected by `indices` (duplicates allowed).
  PointSet gather(std::span<const Index> indices) const;

 private:
  Eigen::MatrixXd points_;
};

/// Finite weighted combination of kernel sections sum_i w_i k(z_i, .).
class Embedding {
 public:
  Embedding(PointSet anchors, Eigen::VectorXd weights);

  const PointSet& anchors() const { return anchors_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Index size() const { return anchors_.size(); }
  Index dim() const { return anchors_.dim(); }

  Embedding scaled(double factor) const;

  /// a*first + b*second, represented by concatenating anchors and weights.
  static Embedding combine(double a, const Embedding& first, double b, const Embedding& second);

 private:
  PointSet anchors_;
  Eigen::VectorXd weights_;
};

double eval_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y,
                   const KernelSpec& spec);

/// Gram matrix K[i, j] = k(rows_i, cols_j). Rows are filled in parallel.
Eigen::MatrixXd gram(const PointSet& rows, const PointSet& cols, const KernelSpec& spec);

/// Single-threaded reference for `gram`; entrywise identical output.
Eigen::MatrixXd gram_serial(const PointSet& rows, const PointSet& cols, const KernelSpec& spec);

/// Writes k(rows[r0 + i], cols[c0 + j]) into `out`; the shape of `out` selects the tile.
void gram_tile(const PointSet& rows, Index r0, const PointSet& cols, Index c0, const KernelSpec& spec,
               Eigen::Ref<Eigen::MatrixXd> out);

Embedding embed_sample(const PointSet& samples);

/// w_a^T K(Z_a, Z_b) w_b, accumulated over row blocks without materializing
/// the full Gram matrix. Block partial sums are reduced in a fixed order, so
/// the result does not depend on the thread count.
double rkhs_inner(const Embedding& a, const Embedding& b, const KernelSpec& spec);
double rkhs_norm(const Embedding& e, const KernelSpec& spec);
double mmd(const Embedding& a, const Embedding& b, const KernelSpec& spec);

/// Median of pairwise Euclidean distances over distinct index pairs.
/// Falls back to 1.0 when the median is zero (all points coincide).
double median_heuristic_bandwidth(const PointSet& points);

}  // namespace pftube
