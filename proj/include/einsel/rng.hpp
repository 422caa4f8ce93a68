#pragma once

#include <cstdint>
#include <string_view>

// Counter-based random generator. Every draw is a pure function of
// (key, counter), so substreams can be handed to workers in any order and
// reproduce bit-identically for a given root seed on every platform.
// Mixing is the SplitMix64 finalizer over a Weyl sequence.

namespace einsel {

namespace detail {

constexpr std::uint64_t kWeylStep = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace detail

// A stream is identified by a 64-bit key. Substreams are derived by hashing
// a purpose label or an index into the key; values are indexed by a counter.
struct RandomStream {
    std::uint64_t key = 0;

    RandomStream substream(std::string_view label) const {
        return RandomStream{detail::mix64(key ^ detail::fnv1a64(label))};
    }
    RandomStream substream(std::uint64_t index) const {
        return RandomStream{detail::mix64((key ^ 0xD1B54A32D192ED03ull) + (index + 1) * detail::kWeylStep)};
    }
    std::uint64_t at(std::uint64_t counter) const {
        return detail::mix64(key + (counter + 1) * detail::kWeylStep);
    }
    // Strictly inside (0,1): the half-offset keeps both endpoints unreachable.
    double uniform01(std::uint64_t counter) const {
        return (static_cast<double>(at(counter) >> 11) + 0.5) * 0x1p-53;
    }
};

// Stateful convenience wrapper over one stream.
class Prng {
public:
    explicit Prng(RandomStream s) : stream_(s) {}

    std::uint64_t next_u64() { return stream_.at(counter_++); }
    double next_uniform01() { return stream_.uniform01(counter_++); }
    bool next_bool() { return (next_u64() & 1ull) != 0; }

    // Uniform index in [0, n). Lemire reduction; bias is below 2^-40 for the
    // range sizes used here.
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    RandomStream stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace einsel
