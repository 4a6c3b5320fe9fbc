#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bqsos {

/// Worker count: hardware concurrency capped by BIQUAD_SOS_THREADS (>= 1).
inline int thread_budget() {
    int n = (int)std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BIQUAD_SOS_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

/// Runs body(0..count-1), possibly across threads. Each index must write only
/// its own slot so results are identical under any schedule; the caller
/// reduces afterwards in a fixed order.
inline void parallel_for(int count, const std::function<void(int)>& body) {
    const int workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve((size_t)workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) body(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace bqsos
