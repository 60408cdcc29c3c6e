#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace haze {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must write
// only to their own output slots; results are then bit-identical for any job
// count.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    int count = std::min(jobs, n);
    workers.reserve(count);
    for (int w = 0; w < count; ++w) {
        workers.emplace_back([&, w] {
            for (int i = w; i < n; i += count) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace haze
