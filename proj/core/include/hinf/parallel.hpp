#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace hinf
{
  /*!
   * Runs body(i) for i in [0, count) over contiguous chunks, one per hardware thread.
   * Each index is processed exactly once and results must be written to per-index
   * slots, so the outcome does not depend on scheduling. The first exception is
   * rethrown after all workers join.
   */
  template <class Body>
  void parallel_for(int count, Body&& body)
  {
    const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
    if (workers <= 1)
    {
      for (int i = 0; i < count; ++i) body(i);
      return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w)
    {
      threads.emplace_back(
          [&, w]
          {
            try
            {
              const int end = std::min(count, (w + 1) * chunk);
              for (int i = w * chunk; i < end; ++i) body(i);
            }
            catch (...)
            {
              errors[w] = std::current_exception();
            }
          });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
}  // namespace hinf
