#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pftube/gaussian.hpp"
#include "pftube/random.hpp"

using namespace pftube;

namespace {

PointSet gaussian_sample(Index n, double mean, double variance, std::uint64_t seed) {
  Rng rng = substream(seed, 0);
  std::normal_distribution<double> g(mean, std::sqrt(variance));
  Eigen::MatrixXd x(n, 1);
  for (Index i = 0; i < n; ++i) x(i, 0) = g(rng);
  return PointSet(std::move(x));
}

}  // namespace

TEST_CASE("analytic embedding of a point mass is the kernel section") {
  const auto spec = KernelSpec::gaussian(1.3);
  Eigen::RowVectorXd a(1), b(1);
  a << 0.4;
  b << -1.1;
  CHECK(gaussian_rbf_analytic_embedding({0.4, 0.0}, spec, -1.1) ==
        doctest::Approx(oracle::rbf(a, b, 1.3)).epsilon(1e-15));
  CHECK(gaussian_rbf_analytic_inner({0.4, 0.0}, {-1.1, 0.0}, spec) ==
        doctest::Approx(oracle::rbf(a, b, 1.3)).epsilon(1e-15));
}

TEST_CASE("analytic embedding matches Monte Carlo") {
  const auto spec = KernelSpec::gaussian(0.9);
  const GaussianLaw law{0.5, 2.0};
  const auto x = gaussian_sample(100000, 0.5, 2.0, 1);
  for (double q : {-2.0, 0.0, 0.5, 3.0}) {
    double sum = 0.0, sq = 0.0;
    Eigen::RowVectorXd qv(1);
    qv << q;
    for (Index i = 0; i < x.size(); ++i) {
      const double k = oracle::rbf(x.matrix().row(i), qv, 0.9);
      sum += k;
      sq += k * k;
    }
    const double n = static_cast<double>(x.size());
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - gaussian_rbf_analytic_embedding(law, spec, q)) < 4.0 * se);
  }
}

TEST_CASE("analytic inner product matches Monte Carlo") {
  const auto spec = KernelSpec::gaussian(1.0);
  const GaussianLaw p{0.5, 2.0}, q{-0.3, 0.7};
  const auto xs = gaussian_sample(100000, p.mean, p.variance, 2);
  const auto ys = gaussian_sample(100000, q.mean, q.variance, 3);
  double sum = 0.0, sq = 0.0;
  for (Index i = 0; i < xs.size(); ++i) {
    const double k = oracle::rbf(xs.matrix().row(i), ys.matrix().row(i), 1.0);
    sum += k;
    sq += k * k;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - gaussian_rbf_analytic_inner(p, q, spec)) < 4.0 * se);
  CHECK(gaussian_rbf_analytic_inner(p, q, spec) == doctest::Approx(gaussian_rbf_analytic_inner(q, p, spec)).epsilon(1e-15));
}

TEST_CASE("mmd_to_gaussian: exact zero and expected size") {
  const auto spec = KernelSpec::gaussian(1.0);
  const Embedding point(PointSet::from_values({0.3}), Eigen::VectorXd::Ones(1));
  CHECK(mmd_to_gaussian(point, {0.3, 0.0}, spec) == 0.0);

  // E ||mu_hat - mu||^2 = (k(x, x) - E k(X, X')) / n = (1 - s / sqrt(s^2 + 2v)) / n
  const Index n = 500;
  const int reps = 400;
  const double v = 2.0;
  double mean_sq = 0.0, mean_sq2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double d = mmd_to_gaussian(embed_sample(gaussian_sample(n, 0.5, v, 100 + static_cast<std::uint64_t>(r))),
                                     {0.5, v}, spec);
    mean_sq += d * d / reps;
    mean_sq2 += d * d * d * d / reps;
  }
  const double expected = (1.0 - 1.0 / std::sqrt(1.0 + 2.0 * v)) / static_cast<double>(n);
  const double se = std::sqrt((mean_sq2 - mean_sq * mean_sq) / reps);
  CHECK(std::abs(mean_sq - expected) < 4.0 * se);
}

TEST_CASE("mmd_to_gaussian: validation") {
  const auto spec = KernelSpec::gaussian(1.0);
  const Embedding two_d(PointSet(Eigen::MatrixXd::Zero(1, 2)), Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(mmd_to_gaussian(two_d, {0.0, 1.0}, spec), std::invalid_argument);
  const Embedding point(PointSet::from_values({0.3}), Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(mmd_to_gaussian(point, {0.0, -1.0}, spec), std::invalid_argument);
}

TEST_CASE("ou_propagate") {
  const GaussianLaw law{0.5, 2.0};
  const auto same = ou_propagate(law, 1e-15, 1.0, 1.0);
  CHECK(same.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(same.variance == doctest::Approx(2.0).epsilon(1e-12));
  const auto t = ou_propagate(law, 0.1, 1.0, 1.0);
  CHECK(t.mean == doctest::Approx(0.5 * std::exp(-0.1)).epsilon(1e-15));
  CHECK(t.variance == doctest::Approx(2.0 * std::exp(-0.2) + 1.0 - std::exp(-0.2)).epsilon(1e-14));
  const auto far = ou_propagate(law, 60.0, 2.0, 0.5);
  CHECK(std::abs(far.mean) < 1e-12);
  CHECK(far.variance == doctest::Approx(1.0).epsilon(1e-12));
  // composition
  const auto twice = ou_propagate(ou_propagate(law, 0.3, 1.0, 1.0), 0.2, 1.0, 1.0);
  const auto once = ou_propagate(law, 0.5, 1.0, 1.0);
  CHECK(twice.mean == doctest::Approx(once.mean).epsilon(1e-14));
  CHECK(twice.variance == doctest::Approx(once.variance).epsilon(1e-14));
}
