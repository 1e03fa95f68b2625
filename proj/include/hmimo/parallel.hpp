// SPDX-License-Identifier: Apache-2.0
//
// hmimo: spatial correlation models and subspace channel estimation for
// holographic massive MIMO with uniform planar arrays
// Copyright (C) 2026 The hmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hmimo
{
    /*
     * Runs body(i) for i in [0, count) on up to `threads` workers. Indices are split
     * into contiguous blocks; callers write results to per-index slots so the outcome
     * never depends on the thread count. The first exception thrown by any worker is
     * rethrown on the calling thread.
     */
    template <typename Body>
    void parallel_for(std::size_t count, std::size_t threads, Body &&body)
    {
        if (count == 0)
            return;
        threads = std::clamp<std::size_t>(threads, 1, count);
        if (threads == 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                body(i);
            return;
        }

        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::size_t block = (count + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t)
        {
            const std::size_t begin = t * block, end = std::min(count, begin + block);
            if (begin >= end)
                break;
            pool.emplace_back([&, begin, end]
                              {
                try
                {
                    for (std::size_t i = begin; i < end; ++i)
                        body(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                } });
        }
        for (auto &th : pool)
            th.join();
        if (error)
            std::rethrow_exception(error);
    }

    inline std::size_t hardware_threads()
    {
        return std::max(1u, std::thread::hardware_concurrency());
    }
}
