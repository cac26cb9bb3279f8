#include "sketchbound/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace sketchbound {

std::vector<double> run_trials(std::size_t count, const std::function<double(std::size_t)>& trial,
                               Execution exec) {
  std::vector<double> out(count, 0.0);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < count; ++i) out[i] = trial(i);
    return out;
  }

  std::exception_ptr failure;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = trial(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(sketchbound_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_limit() { return omp_get_max_threads(); }

int apply_thread_env() {
  if (const char* env = std::getenv("SKETCHBOUND_THREADS")) {
    try {
      set_thread_limit(std::stoi(env));
    } catch (const std::exception&) {
      // unparsable value: keep the runtime default
    }
  }
  return thread_limit();
}

}  // namespace sketchbound
