#include "sketchbound/stats.hpp"

#include "sketchbound/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sketchbound {

MCEstimate summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw SketchError(ErrorKind::InvalidDims, "need at least two samples");
  MCEstimate est;
  est.trials = samples.size();
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - est.mean) * (x - est.mean);
  est.std = std::sqrt(ss / (n - 1.0));
  est.ci_half_width = kCiStandardErrors * est.std / std::sqrt(n);
  return est;
}

namespace {

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small lambda: the CDF series converges fast where the tail series does not.
    const double pi = std::numbers::pi;
    double cdf = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double odd = 2.0 * j - 1.0;
      cdf += std::exp(-odd * odd * pi * pi / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw SketchError(ErrorKind::InvalidDims, "KS test needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

Histogram histogram(std::span<const double> samples, std::size_t bins) {
  Histogram h;
  if (samples.empty() || bins == 0) return h;
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  h.lo = *mn;
  h.hi = *mx > *mn ? *mx : *mn + 1.0;
  h.counts.assign(bins, 0);
  const double width = h.bin_width();
  for (double x : samples) {
    auto bin = static_cast<std::size_t>((x - h.lo) / width);
    h.counts[std::min(bin, bins - 1)]++;
  }
  return h;
}

}  // namespace sketchbound
