#include <doctest.h>

#include "sketchbound/linalg.hpp"
#include "sketchbound/parallel.hpp"
#include "sketchbound/rng.hpp"
#include "sketchbound/worstcase.hpp"

#include <stdexcept>

using namespace sketchbound;

TEST_CASE("derive_seed is a pure function of its arguments") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  RngStream a(5);
  const auto before = a.substream(9).seed();
  a.normal();
  CHECK(a.substream(9).seed() == before);
}

TEST_CASE("run_trials keeps index order") {
  const auto out = run_trials(257, [](std::size_t i) { return static_cast<double>(i) * 0.5; });
  REQUIRE(out.size() == 257);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == 0.5 * static_cast<double>(i));
}

TEST_CASE("parallel and serial trials are bit identical") {
  auto trial = [](std::size_t i) {
    RngStream rng(derive_seed(77, i));
    return singular_values(gaussian_matrix(12, 5, rng)).largest();
  };
  CHECK(run_trials(200, trial, Execution::Serial) == run_trials(200, trial, Execution::Parallel));

  WSampleOptions serial, parallel;
  serial.exec = Execution::Serial;
  parallel.exec = Execution::Parallel;
  for (auto sampler : {WSampler::Direct, WSampler::Bartlett}) {
    serial.sampler = parallel.sampler = sampler;
    CHECK(estimate_expected_W(60, 4, 4, 64, 3, serial).draws ==
          estimate_expected_W(60, 4, 4, 64, 3, parallel).draws);
  }
}

TEST_CASE("trial exceptions propagate") {
  auto bad = [](std::size_t i) -> double {
    if (i == 13) throw std::runtime_error("boom");
    return 0.0;
  };
  CHECK_THROWS_AS(run_trials(40, bad, Execution::Parallel), std::runtime_error);
  CHECK_THROWS_AS(run_trials(40, bad, Execution::Serial), std::runtime_error);
}

TEST_CASE("thread limit") {
  const int before = thread_limit();
  set_thread_limit(2);
  CHECK(thread_limit() == 2);
  set_thread_limit(before);
}
