// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace volprim {

/// Static chunked parallel loop. Chunk boundaries depend only on the range and
/// worker count, and workers own disjoint output ranges, so results do not
/// depend on scheduling.
inline void parallelFor(int64_t begin, int64_t end, const std::function<void(int64_t, int64_t)> &body,
                        int numThreads = 0) {
    const int64_t n = end - begin;
    if (n <= 0) return;
    int workers = numThreads > 0 ? numThreads : int(std::thread::hardware_concurrency());
    if (workers <= 1 || n == 1) {
        body(begin, end);
        return;
    }
    workers = int(std::min<int64_t>(workers, n));
    const int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    threads.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        const int64_t lo = begin + w * chunk;
        const int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto &t : threads) t.join();
}

} // namespace volprim
