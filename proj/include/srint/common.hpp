#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace srint {

/// Sentinel for an infinite energy (singular configuration). Always assigned
/// explicitly, never produced by letting 1/0 overflow.
inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

inline int& detail_thread_count() {
    static int t = 1;
    return t;
}

/// Number of worker threads used by the deterministic reductions. Results are
/// bit-stable for a fixed thread count.
inline int thread_count() { return detail_thread_count(); }

inline void set_thread_count(int t) {
    detail_thread_count() = t < 1 ? 1 : t;
}

/// Uniform double in [0,1) with exactly 53 random bits. We avoid
/// std::uniform_real_distribution because its output is implementation-defined.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// SplitMix64 step, used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Pairwise (tree) summation. Order of operations depends only on the length,
/// so the result is reproducible and the rounding error stays O(log n).
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// Sum of term(i) for i in [0,n), split into thread_count() chunks that are
/// combined in index order. Deterministic for a fixed thread count.
template <class F>
double chunked_sum(std::size_t n, F&& term) {
    if (n == 0) return 0.0;
    int nthreads = thread_count();
    auto sum_range = [&term](std::size_t lo, std::size_t hi) {
        std::vector<double> buf;
        buf.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) buf.push_back(term(i));
        return pairwise_sum(buf);
    };
    if (nthreads <= 1 || n < 1024) return sum_range(0, n);

    std::size_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::future<double>> parts;
    for (std::size_t lo = 0; lo < n; lo += chunk) {
        std::size_t hi = std::min(n, lo + chunk);
        parts.push_back(std::async(std::launch::async, sum_range, lo, hi));
    }
    std::vector<double> partials;
    partials.reserve(parts.size());
    for (auto& p : parts) partials.push_back(p.get());
    return pairwise_sum(partials);
}

inline double sq(double x) { return x * x; }

}  // namespace srint
