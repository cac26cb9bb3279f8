#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sketchbound {

enum class Execution { Serial, Parallel };

/// Runs trial(i) for i in [0, count) and returns the results in index order.
/// The Parallel path distributes indices over OpenMP threads; the Serial path
/// is the reference it must reproduce bit for bit (each trial owns its RNG
/// stream, so scheduling cannot change any value). The first exception thrown
/// by a trial is rethrown after the loop.
std::vector<double> run_trials(std::size_t count, const std::function<double(std::size_t)>& trial,
                               Execution exec = Execution::Parallel);

/// Caps the OpenMP pool. A value of 0 leaves the runtime default.
void set_thread_limit(int threads);
int thread_limit();

/// Reads SKETCHBOUND_THREADS and applies it; returns the resulting limit.
int apply_thread_env();

}  // namespace sketchbound
