// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_PARALLEL_HPP
#define SSMO_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ssmo
{

// Worker count used by parallel_for. Defaults to the SSM_OBLIQUE_THREADS environment
// variable when set, otherwise the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, n). Each index is handled by exactly one call, so results
// written to per-index slots do not depend on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

}  // namespace ssmo

#endif  // SSMO_PARALLEL_HPP
