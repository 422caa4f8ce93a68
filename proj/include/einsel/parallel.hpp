#pragma once

#include <cstddef>
#include <thread>
#include <vector>

// Deterministic fan-out helpers. Work is cut into fixed-size chunks and any
// reduction runs over per-chunk results in a fixed pairwise tree order, so a
// result is bit-identical for any worker count.

namespace einsel {

inline constexpr std::size_t kChunkSize = 4096;

// Runs fn(chunk_index, begin, end) for every chunk of [0, n). Chunks are
// distributed over `threads` workers; fn must only write chunk-local data.
template <typename Fn>
void for_each_chunk(std::size_t n, int threads, Fn&& fn) {
    const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
    if (threads <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t workers = std::min<std::size_t>(threads, n_chunks);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < n_chunks; c += workers)
                fn(c, c * kChunkSize, std::min(n, (c + 1) * kChunkSize));
        });
    }
    for (auto& t : pool) t.join();
}

// Pairwise tree sum over values in index order; independent of how the
// values were produced.
template <typename T>
T tree_sum(std::vector<T> v) {
    if (v.empty()) return T{};
    while (v.size() > 1) {
        std::size_t half = v.size() / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (v.size() % 2 == 1) {
            v[half] = v.back();
            v.resize(half + 1);
        } else {
            v.resize(half);
        }
    }
    return v[0];
}

}  // namespace einsel
