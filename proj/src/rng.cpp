#include "fictsense/rng.hpp"

namespace fictsense {

namespace {

// splitmix64 finalizer, used as a 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    // Rejection sampling on the top range that is an exact multiple of n.
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
    return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ fnv1a64(key));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(index + 0xd1b54a32d192ed03ULL));
}

}  // namespace fictsense
