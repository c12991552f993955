#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace hsps {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent stream identified by (master, a, b).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0)
{
    return mix64(mix64(mix64(master) ^ a) ^ (b + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0)
{
    return Rng{derive_seed(master, a, b)};
}

/// Welford accumulator, mergeable in a fixed order.
struct RunningStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningStats& o)
    {
        if (o.n == 0) {
            return;
        }
        if (n == 0) {
            *this = o;
            return;
        }
        auto na = static_cast<double>(n);
        auto nb = static_cast<double>(o.n);
        double d = o.mean - mean;
        double total = na + nb;
        mean += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }

    [[nodiscard]] double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    [[nodiscard]] double stddev() const { return std::sqrt(variance()); }
};

inline unsigned default_thread_count()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `draw(rng)` n times and accumulates each of its K outputs.
///
/// Draws are grouped in fixed chunks; chunk c uses the stream (seed, c) and
/// chunks are merged in index order, so the result does not depend on
/// `threads`.
template <std::size_t K, class Draw>
std::array<RunningStats, K> chunked_resample(std::size_t n, std::uint64_t seed, Draw draw, unsigned threads = 0)
{
    constexpr std::size_t kChunk = 512;
    std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::array<RunningStats, K>> partial(n_chunks);

    auto run_chunk = [&](std::size_t c) {
        Rng rng = make_rng(seed, 0x5245534dULL, c);
        std::size_t begin = c * kChunk;
        std::size_t end = std::min(n, begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) {
            std::array<double, K> v = draw(rng);
            for (std::size_t k = 0; k < K; ++k) {
                partial[c][k].add(v[k]);
            }
        }
    };

    unsigned n_threads = threads == 0 ? default_thread_count() : threads;
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_chunks));
    if (n_threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            run_chunk(c);
        }
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < n_chunks; c += n_threads) {
                    run_chunk(c);
                }
            });
        }
    }

    std::array<RunningStats, K> total{};
    for (const auto& chunk : partial) {
        for (std::size_t k = 0; k < K; ++k) {
            total[k].merge(chunk[k]);
        }
    }
    return total;
}

/// Normal(mean, sigma) redrawn until it falls in [lo, hi].
inline double truncated_normal(Rng& rng, double mean, double sigma, double lo, double hi)
{
    if (sigma <= 0.0) {
        return mean;
    }
    std::normal_distribution<double> dist(mean, sigma);
    for (;;) {
        double x = dist(rng);
        if (x >= lo && x <= hi) {
            return x;
        }
    }
}

}  // namespace hsps
