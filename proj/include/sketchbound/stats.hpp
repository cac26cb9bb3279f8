#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sketchbound {

/// Monte Carlo mean with a 3-standard-error half width.
struct MCEstimate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1 denominator)
  std::size_t trials = 0;
  double ci_half_width = 0.0;

  double lo() const { return mean - ci_half_width; }
  double hi() const { return mean + ci_half_width; }
};

inline constexpr double kCiStandardErrors = 3.0;

/// Requires at least two samples.
MCEstimate summarize(std::span<const double> samples);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution for the p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size()); }
};

Histogram histogram(std::span<const double> samples, std::size_t bins);

}  // namespace sketchbound
