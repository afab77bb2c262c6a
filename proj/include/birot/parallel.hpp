#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace birot {

/// Number of worker threads, taken from BIROT_THREADS if set, otherwise the
/// hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("BIROT_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static-partition parallel loop over [begin, end). Each index is processed
/// by exactly one thread and results must be written to disjoint slots, so the
/// outcome is independent of the thread count.
inline void parallel_for(std::size_t begin, std::size_t end,
                         const std::function<void(std::size_t)>& body) {
    const std::size_t n = end - begin;
    const int nt = std::min<std::size_t>(thread_count(), n);
    if (nt <= 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = begin + chunk * t;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Fixed-order pairwise (cascade) summation. Deterministic for a given input
/// order regardless of threading, and more accurate than a running sum.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Pairwise sum of f(i) for i in [0, n) using a scratch buffer.
template <class F>
double pairwise_sum_n(std::size_t n, F&& f) {
    std::vector<double> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = f(i);
    return pairwise_sum(buf);
}

}  // namespace birot
