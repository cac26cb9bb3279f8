#include <doctest.h>

#include "sketchbound/stats.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace sketchbound;

TEST_CASE("summarize") {
  const std::vector<double> x{1, 2, 3, 4};
  const MCEstimate e = summarize(x);
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.std == doctest::Approx(1.2909944487358056).epsilon(1e-14));
  CHECK(e.trials == 4);
  CHECK(e.ci_half_width == doctest::Approx(3.0 * 1.2909944487358056 / 2.0));
  CHECK(e.lo() < e.mean);
  CHECK(e.hi() > e.mean);
}

TEST_CASE("ks_two_sample against reference values") {
  // statistics and p-values cross-checked with an independent implementation
  const KsResult r = ks_two_sample({0.1, 0.4, 0.7, 1.2, 1.9, 2.5}, {0.3, 0.35, 0.8, 2.8, 3.1, 3.3, 4.0});
  CHECK(r.statistic == doctest::Approx(0.5714285714285714).epsilon(1e-14));
  CHECK(r.p_value == doctest::Approx(0.15504417912365295).epsilon(1e-9));

  std::vector<double> a(50), b(50);
  std::iota(a.begin(), a.end(), 0.0);
  std::iota(b.begin(), b.end(), 5.0);
  const KsResult s = ks_two_sample(a, b);
  CHECK(s.statistic == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(s.p_value == doctest::Approx(0.9541292642221882).epsilon(1e-9));

  CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));
}

TEST_CASE("ks_two_sample separates shifted samples") {
  std::vector<double> a(400), b(400);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<double>(i) / 400.0;
    b[i] = a[i] + 0.3;
  }
  CHECK(ks_two_sample(a, b).p_value < 1e-6);
}

TEST_CASE("histogram") {
  const std::vector<double> x{0.0, 0.1, 0.5, 0.9, 1.0};
  const Histogram h = histogram(x, 2);
  CHECK(h.lo == 0.0);
  CHECK(h.hi == 1.0);
  REQUIRE(h.counts.size() == 2);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 3);  // the maximum lands in the last bin
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == x.size());
  CHECK(h.bin_width() == doctest::Approx(0.5));

  const Histogram flat = histogram(std::vector<double>{2.0, 2.0}, 4);
  CHECK(std::accumulate(flat.counts.begin(), flat.counts.end(), std::size_t{0}) == 2);
}
