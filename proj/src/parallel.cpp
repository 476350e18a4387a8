// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ssmo
{

namespace
{

std::size_t default_threads()
{
  if (const char *env = std::getenv("SSM_OBLIQUE_THREADS"))
  {
    try
    {
      const long n = std::stol(env);
      if (n > 0)
      {
        return static_cast<std::size_t>(n);
      }
    }
    catch (const std::exception &)
    {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::size_t> &threads_setting()
{
  static std::atomic<std::size_t> n{default_threads()};
  return n;
}

}  // namespace

std::size_t thread_count()
{
  return threads_setting().load();
}

void set_thread_count(std::size_t n)
{
  threads_setting().store(std::max<std::size_t>(1, n));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body)
{
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; w++)
  {
    pool.emplace_back(
        [&]
        {
          for (std::size_t i = next++; i < n; i = next++)
          {
            try
            {
              body(i);
            }
            catch (...)
            {
              std::lock_guard<std::mutex> lock(failure_mutex);
              if (!failure)
              {
                failure = std::current_exception();
              }
            }
          }
        });
  }
  for (auto &t : pool)
  {
    t.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

}  // namespace ssmo
