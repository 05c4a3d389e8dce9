#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace fictsense {

// Deterministic PRNG with explicit stream derivation. Every randomized
// operation in the library draws from a stream derived from (master seed,
// stable item key), so results never depend on iteration order or thread
// schedule. Draws are implemented here instead of with <random>
// distributions, whose output is not pinned down by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // splitmix64
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased draw in [0, n); n must be positive.
    std::uint64_t uniform_below(std::uint64_t n);

    // Uniform in [0, 1) with 53 random bits.
    double unit_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Fisher-Yates with our own bounded draw, identical on every platform.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Stream seeds for (seed, key) pairs. Equal inputs give equal streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace fictsense
