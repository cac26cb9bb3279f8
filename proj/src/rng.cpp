#include "sketchbound/rng.hpp"

#include <cmath>

namespace sketchbound {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) noexcept {
  return base ^ mix64(a + 0x632be59bd9b4e019ULL);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept {
  return base ^ mix64(mix64(a + 0x632be59bd9b4e019ULL) ^ (b + 0x2545f4914f6cdd1dULL));
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

double RngStream::normal() {
  ++position_;
  return normal_(engine_);
}

double RngStream::chi(double dof) {
  ++position_;
  // chi^2_d = 2 * Gamma(d/2, 1)
  std::gamma_distribution<double> gamma(0.5 * dof, 2.0);
  return std::sqrt(gamma(engine_));
}

double RngStream::uniform() {
  ++position_;
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

}  // namespace sketchbound
