#pragma once

#include <cstdint>
#include <vector>

namespace ccb {

// Deterministic RNG used by every stochastic component. std::mt19937_64 is
// specified by the standard, but the distributions are not, so bounded
// sampling and shuffling are implemented here to get identical streams on
// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        next_u64(); // splitmix64 warmup
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    // Derive an independent stream, e.g. one per iteration or per tree.
    Rng fork(std::uint64_t stream_id) {
        Rng child(state_ ^ (0xd6e8feb86659fd93ULL * (stream_id + 1)));
        return child;
    }

private:
    std::uint64_t state_;
};

// FNV-1a 64-bit, used for token hashing and input digests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace ccb
