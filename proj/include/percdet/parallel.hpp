#ifndef PERCDET_PARALLEL_HPP
#define PERCDET_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace percdet {

inline constexpr const char* kWorkerEnvVar = "PERCDET_THREADS";

/// Worker count from PERCDET_THREADS, else the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv(kWorkerEnvVar)) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Evaluates fn(trial, scratch) for every trial index and returns the results
/// in trial order. Each worker owns one default-constructed Scratch, so the
/// output does not depend on the number of workers or the schedule.
template <typename Result, typename Scratch, typename Fn>
std::vector<Result> run_trials(std::size_t trials, Fn&& fn, std::size_t workers = worker_count()) {
  std::vector<Result> results(trials);
  workers = std::max<std::size_t>(1, std::min(workers, trials));
  if (workers == 1) {
    Scratch scratch{};
    for (std::size_t t = 0; t < trials; ++t) results[t] = fn(t, scratch);
    return results;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          Scratch scratch{};
          for (std::size_t t = w; t < trials; t += workers) results[t] = fn(t, scratch);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace percdet

#endif  // PERCDET_PARALLEL_HPP
