#pragma once

#include <cstdint>
#include <random>

namespace sketchbound {

/// splitmix64 finalizer; used to turn (seed, index...) tuples into
/// well-separated stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for an independent sub-stream. Depends only on its arguments, so a
/// parallel schedule cannot change which stream a trial receives.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept;

/// Seeded scalar stream of standard normal (and chi) draws.
/// Not thread-safe; give each concurrent trial its own stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  /// Number of scalar draws consumed so far.
  std::uint64_t position() const noexcept { return position_; }

  double normal();
  /// Square root of a chi-square variate with `dof` degrees of freedom.
  double chi(double dof);
  double uniform();

  /// Independent child stream, keyed by `tag`. Does not advance this stream.
  RngStream substream(std::uint64_t tag) const { return RngStream(derive_seed(seed_, tag)); }

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace sketchbound
