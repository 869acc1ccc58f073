#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pftube/bootstrap.hpp"
#include "pftube/parallel.hpp"

using namespace pftube;

namespace {

PairedDataset ou_data(Index m, std::uint64_t seed) {
  return simulate_pairs(SdeModel::ornstein_uhlenbeck(1.0, 1.0), GaussianInit{0.5, 2.0}, 0.1, m, 1e-3, seed);
}

double median(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace

TEST_CASE("quantile rank") {
  CHECK(quantile_rank(200, 0.05) == 190);
  CHECK(quantile_rank(100, 0.1) == 90);
  CHECK(quantile_rank(10, 0.05) == 10);  // ceil(9.5)
  CHECK(quantile_rank(1, 0.5) == 1);
  CHECK(quantile_rank(3, 0.99) == 1);
  CHECK_THROWS_AS(quantile_rank(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile_rank(10, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile_rank(0, 0.05), std::invalid_argument);
}

TEST_CASE("summary picks the 1-based ceil(m_b (1 - alpha)) entry") {
  std::vector<double> devs;
  for (int i = 200; i >= 1; --i) devs.push_back(0.01 * i);
  const auto s = summarize_deviations(devs, 0.05, 3);
  CHECK(std::is_sorted(s.deviations.begin(), s.deviations.end()));
  CHECK(s.quantile_delta == s.deviations[189]);
  CHECK(s.quantile_delta == doctest::Approx(1.90).epsilon(1e-14));
  CHECK(s.confidence_alpha == 0.05);
  CHECK(s.seed == 3);
}

TEST_CASE("resample indices") {
  const auto a = resample_indices(50, 7, 3);
  CHECK(a.size() == 50);
  CHECK(*std::min_element(a.begin(), a.end()) >= 0);
  CHECK(*std::max_element(a.begin(), a.end()) < 50);
  CHECK(a == resample_indices(50, 7, 3));
  CHECK(a != resample_indices(50, 7, 4));
  CHECK(a != resample_indices(50, 8, 3));
}

TEST_CASE("degenerate data gives zero deviation") {
  const PairedDataset d(PointSet::from_values(std::vector<double>(30, 0.4)),
                        PointSet::from_values(std::vector<double>(30, -0.2)), 0.1);
  const auto spec = KernelSpec::gaussian(1.0);
  const auto fast = bootstrap_deviation_quantile(d, 0.01, spec, 50, 0.05, 1);
  for (double v : fast.deviations) CHECK(v == 0.0);
  CHECK(fast.quantile_delta == 0.0);
  const auto ref = bootstrap_deviation_quantile_reference(d, 0.01, spec, 20, 0.05, 1);
  for (double v : ref.deviations) CHECK(v == 0.0);
}

TEST_CASE("fast path agrees with the refitting reference") {
  const auto d = ou_data(40, 2);
  const auto spec = KernelSpec::gaussian(median_heuristic_bandwidth(d.x));
  const auto fast = bootstrap_deviation_quantile(d, 0.01, spec, 30, 0.05, 5);
  const auto ref = bootstrap_deviation_quantile_reference(d, 0.01, spec, 30, 0.05, 5);
  REQUIRE(fast.deviations.size() == ref.deviations.size());
  for (std::size_t i = 0; i < ref.deviations.size(); ++i) {
    CHECK(std::abs(fast.deviations[i] - ref.deviations[i]) < 1e-8);
  }
  CHECK(std::abs(fast.quantile_delta - ref.quantile_delta) < 1e-8);
}

TEST_CASE("determinism and thread-count independence") {
  const auto d = ou_data(60, 3);
  const auto spec = KernelSpec::gaussian(1.0);
  const int before = thread_limit();
  set_thread_limit(1);
  const auto one = bootstrap_deviation_quantile(d, 0.01, spec, 40, 0.05, 11);
  const auto again = bootstrap_deviation_quantile(d, 0.01, spec, 40, 0.05, 11);
  set_thread_limit(4);
  const auto four = bootstrap_deviation_quantile(d, 0.01, spec, 40, 0.05, 11);
  set_thread_limit(before);
  CHECK(one.deviations == again.deviations);
  CHECK(one.deviations == four.deviations);
  CHECK(one.quantile_delta == four.quantile_delta);
  CHECK(bootstrap_deviation_quantile(d, 0.01, spec, 40, 0.05, 12).deviations != one.deviations);
}

TEST_CASE("quantile monotone in alpha, deviations nonnegative") {
  const auto d = ou_data(50, 4);
  const auto spec = KernelSpec::gaussian(1.0);
  const auto s = bootstrap_deviation_quantile(d, 0.01, spec, 60, 0.05, 2);
  for (double v : s.deviations) CHECK(v >= 0.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double alpha : {0.01, 0.05, 0.2, 0.5, 0.9}) {
    const double q = summarize_deviations(s.deviations, alpha, 2).quantile_delta;
    CHECK(q <= previous);
    previous = q;
  }
  const auto single = bootstrap_deviation_quantile(d, 0.01, spec, 1, 0.05, 2);
  CHECK(single.deviations.size() == 1);
  CHECK(single.quantile_delta == single.deviations[0]);
}

TEST_CASE("argument validation") {
  const auto d = ou_data(10, 5);
  const auto spec = KernelSpec::gaussian(1.0);
  CHECK_THROWS_AS(bootstrap_deviation_quantile(d, 0.01, spec, 0, 0.05, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_deviation_quantile(d, 0.01, spec, 10, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_deviation_quantile(d, 0.01, spec, 10, 0.0, 1), std::invalid_argument);
}

TEST_CASE("median deviation decays with m") {
  const auto spec = KernelSpec::gaussian(1.0);
  const auto small = bootstrap_deviation_quantile(ou_data(100, 6), 0.01, spec, 40, 0.05, 6);
  const auto large = bootstrap_deviation_quantile(ou_data(1600, 6), 0.01, spec, 40, 0.05, 6);
  CHECK(median(large.deviations) < median(small.deviations));
}
