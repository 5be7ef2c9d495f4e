#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace shrec {

// Deterministic 64-bit generator (splitmix64). Used instead of std::mt19937
// plus std::shuffle so that sampled splits are reproducible independent of
// the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = ~0ULL - ~0ULL % bound;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % bound;
    }

    double next_double() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Fisher-Yates shuffle driven by Rng.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        using std::swap;
        swap(v[i - 1], v[j]);
    }
}

// Derive a named substream seed from a master seed. Every piece of
// randomness in the pipeline flows through this, keyed by a purpose tag,
// so grid cells and per-target splits are independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    std::uint64_t h = 1469598103934665603ULL ^ master;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    // Mix once more so adjacent tags do not yield correlated streams.
    Rng mix(h);
    return mix.next();
}

}  // namespace shrec
